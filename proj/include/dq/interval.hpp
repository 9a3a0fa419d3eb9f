#ifndef DQ_INTERVAL_HPP
#define DQ_INTERVAL_HPP

#include <optional>
#include <vector>

#include "dq/rational.hpp"

namespace dq {

// Open interval (lo, hi) with exact rational endpoints, lo < hi.
// Boundary points carry no Lebesgue measure and are never disambiguated.
struct Interval {
  Rat lo, hi;

  Rat length() const { return hi - lo; }
  bool contains(const Rat& x) const { return lo < x && x < hi; }
};

Interval make_interval(Rat lo, Rat hi);  // throws std::invalid_argument if lo >= hi
Interval make_interval(double lo, double hi);

std::optional<Interval> intersect(const Interval& a, const Interval& b);

// Finite union of disjoint open intervals, sorted, non-touching after
// normalization (touching inputs are merged, which preserves measure).
class IntervalUnion {
 public:
  IntervalUnion() = default;
  static IntervalUnion from(std::vector<Interval> parts);
  static IntervalUnion single(Interval iv);

  const std::vector<Interval>& parts() const { return parts_; }
  bool empty() const { return parts_.empty(); }
  size_t size() const { return parts_.size(); }
  Rat measure() const;

  IntervalUnion intersect(const Interval& window) const;
  IntervalUnion unite(const IntervalUnion& other) const;
  bool disjoint_from(const IntervalUnion& other) const;
  bool contains(const Rat& x) const;

 private:
  std::vector<Interval> parts_;  // normalized
};

// A_n of the middle-third construction: the 2^{n-1} open intervals of
// length 3^{-n} removed at step n. Endpoints have denominator 3^n.
IntervalUnion cantor_removed(int n, int depth_cap = 24);

// Exact inf of |x - y| over x in U, y in V; 0 if the unions overlap.
Rat union_distance(const IntervalUnion& u, const IntervalUnion& v);

}  // namespace dq

#endif
