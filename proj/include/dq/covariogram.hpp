#ifndef DQ_COVARIOGRAM_HPP
#define DQ_COVARIOGRAM_HPP

#include <utility>
#include <vector>

#include "dq/interval.hpp"

namespace dq {

// lambda(t) = measure{x in I : x + t in J} for an ordered pair of
// intervals (J to the right of I). Piecewise linear, nonnegative, with
// compact support [J.lo - I.hi, J.hi - I.lo]; reduces product-domain
// integrals of f(y - x) to one dimension:
//   iint_{I x J} f(y - x) dx dy = int f(t) lambda(t) dt.
struct Covariogram {
  // knots (t, lambda(t)); lambda is 0 outside [knots.front, knots.back]
  std::vector<std::pair<Rat, Rat>> knots;

  Rat mass_exact() const;  // integral of lambda, equals |I| * |J|
  double value(double t) const;
  double support_lo() const { return to_double(knots.front().first); }
  double support_hi() const { return to_double(knots.back().first); }
};

// Requires J.lo >= I.hi (disjoint or touching, J to the right).
Covariogram covariogram(const Interval& I, const Interval& J);

// Closed forms over [t_lo, t_hi] intersected with the support.
double integrate_lambda_over_t(const Covariogram& cg, double t_lo, double t_hi);
double integrate_lambda_over_t2(const Covariogram& cg, double t_lo, double t_hi);

}  // namespace dq

#endif
