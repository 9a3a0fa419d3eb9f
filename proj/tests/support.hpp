#ifndef DQ_TESTS_SUPPORT_HPP
#define DQ_TESTS_SUPPORT_HPP

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "dq/levelset.hpp"
#include "dq/rational.hpp"

namespace dq::testing {

// Adaptive 7-point triangle quadrature; an oracle for the closed-form
// polygon integrals, independent of the trapezoid/antiderivative path.
inline double triangle_rule(const std::function<double(double, double)>& f, double ax,
                            double ay, double bx, double by, double cx, double cy) {
  static const double w0 = 0.225;
  static const double wa = 0.132394152788506;
  static const double wb = 0.125939180544827;
  static const double a1 = 0.059715871789770, a2 = 0.470142064105115;
  static const double b1 = 0.797426985353087, b2 = 0.101286507323456;
  auto at = [&](double l1, double l2, double l3) {
    return f(l1 * ax + l2 * bx + l3 * cx, l1 * ay + l2 * by + l3 * cy);
  };
  double area = 0.5 * std::fabs((bx - ax) * (cy - ay) - (cx - ax) * (by - ay));
  if (area == 0) return 0;
  return area * (w0 * at(1.0 / 3, 1.0 / 3, 1.0 / 3) +
                 wa * (at(a1, a2, a2) + at(a2, a1, a2) + at(a2, a2, a1)) +
                 wb * (at(b1, b2, b2) + at(b2, b1, b2) + at(b2, b2, b1)));
}

inline double triangle_quad(const std::function<double(double, double)>& f, double ax,
                            double ay, double bx, double by, double cx, double cy,
                            int depth = 0) {
  double whole = triangle_rule(f, ax, ay, bx, by, cx, cy);
  if (depth >= 13) return whole;
  double mabx = 0.5 * (ax + bx), maby = 0.5 * (ay + by);
  double mbcx = 0.5 * (bx + cx), mbcy = 0.5 * (by + cy);
  double mcax = 0.5 * (cx + ax), mcay = 0.5 * (cy + ay);
  double sum = triangle_rule(f, ax, ay, mabx, maby, mcax, mcay) +
               triangle_rule(f, mabx, maby, bx, by, mbcx, mbcy) +
               triangle_rule(f, mcax, mcay, mbcx, mbcy, cx, cy) +
               triangle_rule(f, mabx, maby, mbcx, mbcy, mcax, mcay);
  if (std::fabs(sum - whole) <= 1e-10 * (1.0 + std::fabs(sum))) return sum;
  return triangle_quad(f, ax, ay, mabx, maby, mcax, mcay, depth + 1) +
         triangle_quad(f, mabx, maby, bx, by, mbcx, mbcy, depth + 1) +
         triangle_quad(f, mcax, mcay, mbcx, mbcy, cx, cy, depth + 1) +
         triangle_quad(f, mabx, maby, mbcx, mbcy, mcax, mcay, depth + 1);
}

// centroid-fan oracle for iint_cell f over a convex polygon
inline double polygon_quad(const ConvexCell& cell,
                           const std::function<double(double, double)>& f) {
  if (cell.empty()) return 0;
  double cx = 0, cy = 0;
  for (const auto& v : cell.verts) {
    cx += to_double(v.first);
    cy += to_double(v.second);
  }
  cx /= static_cast<double>(cell.verts.size());
  cy /= static_cast<double>(cell.verts.size());
  double total = 0;
  for (size_t k = 0; k < cell.verts.size(); ++k) {
    const auto& p = cell.verts[k];
    const auto& q = cell.verts[(k + 1) % cell.verts.size()];
    total += triangle_quad(f, to_double(p.first), to_double(p.second), to_double(q.first),
                           to_double(q.second), cx, cy);
  }
  return total;
}

inline Rat random_rat(std::mt19937_64& rng, long denom_cap = 1000) {
  std::uniform_int_distribution<long> den(1, denom_cap);
  long d = den(rng);
  std::uniform_int_distribution<long> num(0, 8 * d);
  return frac(num(rng), d);
}

}  // namespace dq::testing

#endif
