#include "dq/interval.hpp"

#include <algorithm>

namespace dq {

Interval make_interval(Rat lo, Rat hi) {
  if (lo >= hi) throw std::invalid_argument("make_interval: requires lo < hi");
  return Interval{std::move(lo), std::move(hi)};
}

Interval make_interval(double lo, double hi) {
  return make_interval(rat_from_double(lo), rat_from_double(hi));
}

std::optional<Interval> intersect(const Interval& a, const Interval& b) {
  Rat lo = std::max(a.lo, b.lo);
  Rat hi = std::min(a.hi, b.hi);
  if (lo >= hi) return std::nullopt;
  return Interval{lo, hi};
}

IntervalUnion IntervalUnion::from(std::vector<Interval> parts) {
  for (const auto& p : parts) {
    if (p.lo >= p.hi) throw std::invalid_argument("IntervalUnion: degenerate interval");
  }
  std::sort(parts.begin(), parts.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  IntervalUnion u;
  for (auto& p : parts) {
    if (!u.parts_.empty() && p.lo <= u.parts_.back().hi) {
      if (p.hi > u.parts_.back().hi) u.parts_.back().hi = p.hi;
    } else {
      u.parts_.push_back(std::move(p));
    }
  }
  return u;
}

IntervalUnion IntervalUnion::single(Interval iv) {
  return from({std::move(iv)});
}

Rat IntervalUnion::measure() const {
  Rat m = 0;
  for (const auto& p : parts_) m += p.hi - p.lo;
  return m;
}

IntervalUnion IntervalUnion::intersect(const Interval& window) const {
  std::vector<Interval> out;
  for (const auto& p : parts_) {
    if (auto iv = dq::intersect(p, window)) out.push_back(*iv);
  }
  IntervalUnion u;
  u.parts_ = std::move(out);  // already sorted and disjoint
  return u;
}

IntervalUnion IntervalUnion::unite(const IntervalUnion& other) const {
  std::vector<Interval> all = parts_;
  all.insert(all.end(), other.parts_.begin(), other.parts_.end());
  return from(std::move(all));
}

bool IntervalUnion::disjoint_from(const IntervalUnion& other) const {
  size_t i = 0, j = 0;
  while (i < parts_.size() && j < other.parts_.size()) {
    const Interval& a = parts_[i];
    const Interval& b = other.parts_[j];
    if (a.hi <= b.lo) {
      ++i;
    } else if (b.hi <= a.lo) {
      ++j;
    } else {
      return false;
    }
  }
  return true;
}

bool IntervalUnion::contains(const Rat& x) const {
  // binary search on lo
  size_t lo = 0, hi = parts_.size();
  while (lo < hi) {
    size_t mid = (lo + hi) / 2;
    if (parts_[mid].lo < x) lo = mid + 1; else hi = mid;
  }
  if (lo == 0) return false;
  return parts_[lo - 1].contains(x);
}

IntervalUnion cantor_removed(int n, int depth_cap) {
  if (n < 1) throw std::invalid_argument("cantor_removed: n >= 1 required");
  if (n > depth_cap)
    throw ResourceError("cantor_removed: depth " + std::to_string(n) +
                        " exceeds cap " + std::to_string(depth_cap));
  std::vector<Interval> parts{Interval{Rat(1, 3), Rat(2, 3)}};
  for (int step = 1; step < n; ++step) {
    std::vector<Interval> next;
    next.reserve(parts.size() * 2);
    const Rat third(1, 3);
    const Rat shift(2, 3);
    for (const auto& p : parts) next.push_back(Interval{p.lo * third, p.hi * third});
    for (const auto& p : parts)
      next.push_back(Interval{shift + p.lo * third, shift + p.hi * third});
    parts = std::move(next);
  }
  return IntervalUnion::from(std::move(parts));
}

Rat union_distance(const IntervalUnion& u, const IntervalUnion& v) {
  if (u.empty() || v.empty())
    throw std::invalid_argument("union_distance: empty union");
  if (!u.disjoint_from(v)) return Rat(0);
  std::optional<Rat> best;
  size_t i = 0, j = 0;
  const auto& a = u.parts();
  const auto& b = v.parts();
  while (i < a.size() && j < b.size()) {
    Rat gap;
    if (a[i].hi <= b[j].lo) {
      gap = b[j].lo - a[i].hi;
      ++i;
    } else {
      gap = a[i].lo - b[j].hi;
      ++j;
    }
    if (!best || gap < *best) best = gap;
    if (*best == 0) break;
  }
  return *best;
}

}  // namespace dq
