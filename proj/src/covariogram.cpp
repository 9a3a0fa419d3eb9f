#include "dq/covariogram.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dq {

Covariogram covariogram(const Interval& I, const Interval& J) {
  if (J.lo < I.hi)
    throw std::invalid_argument("covariogram: J must lie to the right of I");
  Rat gap = J.lo - I.hi;
  Rat p = I.length();
  Rat q = J.length();
  Rat mn = std::min(p, q);
  Rat mx = std::max(p, q);
  Covariogram cg;
  cg.knots.emplace_back(gap, Rat(0));
  cg.knots.emplace_back(gap + mn, mn);
  if (mn != mx) cg.knots.emplace_back(gap + mx, mn);
  cg.knots.emplace_back(gap + p + q, Rat(0));
  return cg;
}

Rat Covariogram::mass_exact() const {
  Rat m = 0;
  for (size_t k = 0; k + 1 < knots.size(); ++k) {
    m += (knots[k + 1].first - knots[k].first) * (knots[k].second + knots[k + 1].second) / 2;
  }
  return m;
}

double Covariogram::value(double t) const {
  const double t0 = support_lo();
  const double t1 = support_hi();
  if (t <= t0 || t >= t1) return 0.0;
  for (size_t k = 0; k + 1 < knots.size(); ++k) {
    double a = to_double(knots[k].first);
    double b = to_double(knots[k + 1].first);
    if (t <= b) {
      double la = to_double(knots[k].second);
      double lb = to_double(knots[k + 1].second);
      return la + (lb - la) * (t - a) / (b - a);
    }
  }
  return 0.0;
}

namespace {

// Visits the linear segments of lambda clipped to [t_lo, t_hi]; each
// segment is lambda(t) = alpha*t + beta on [a, b].
template <class F>
void for_each_segment(const Covariogram& cg, double t_lo, double t_hi, F&& f) {
  for (size_t k = 0; k + 1 < cg.knots.size(); ++k) {
    double a = to_double(cg.knots[k].first);
    double b = to_double(cg.knots[k + 1].first);
    double la = to_double(cg.knots[k].second);
    double lb = to_double(cg.knots[k + 1].second);
    double lo = std::max(a, t_lo);
    double hi = std::min(b, t_hi);
    if (lo >= hi) continue;
    double alpha = (lb - la) / (b - a);
    double beta = la - alpha * a;
    f(lo, hi, alpha, beta);
  }
}

}  // namespace

double integrate_lambda_over_t(const Covariogram& cg, double t_lo, double t_hi) {
  double total = 0;
  for_each_segment(cg, t_lo, t_hi, [&](double a, double b, double alpha, double beta) {
    // int (alpha + beta/t) dt; the a == 0 segment has beta == 0 exactly
    total += alpha * (b - a);
    if (beta != 0.0) total += beta * std::log(b / a);
  });
  return total;
}

double integrate_lambda_over_t2(const Covariogram& cg, double t_lo, double t_hi) {
  double total = 0;
  for_each_segment(cg, t_lo, t_hi, [&](double a, double b, double alpha, double beta) {
    // int (alpha/t + beta/t^2) dt; diverges at 0, so callers clip t_lo > 0
    if (alpha != 0.0) total += alpha * std::log(b / a);
    if (beta != 0.0) total += beta * (1.0 / a - 1.0 / b);
  });
  return total;
}

}  // namespace dq
