#ifndef DQ_LEVELSET_HPP
#define DQ_LEVELSET_HPP

#include <span>
#include <vector>

#include <json.hpp>

#include "dq/interval.hpp"
#include "dq/piecewise.hpp"
#include "dq/weight.hpp"

namespace dq {

struct DiagonalContact : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// difference-quotient band E = [q_lo, q_hi]
struct ZBand {
  double q_lo = 0, q_hi = 0;
};

// Convex polygon in the (x, y) plane with exact rational vertices, CCW.
// Cells live strictly above the diagonal except possibly for an isolated
// touching corner, where the 1/(y-x) integral stays finite.
struct ConvexCell {
  std::vector<std::pair<Rat, Rat>> verts;
  bool empty() const { return verts.size() < 3; }
};

// Rectangle (X x Y) clipped against q_lo <= Rphi <= q_hi for affine
// phi-pieces (mL, qL) on X and (mR, qR) on Y; exact rational predicates.
ConvexCell clip_band_cell(const Interval& X, const Interval& Y, const Rat& mL,
                          const Rat& qL, const Rat& mR, const Rat& qR, const Rat& q_lo,
                          const Rat& q_hi);

// iint_cell 1/(y-x) dx dy via the antiderivative G = -(y-x)(ln(y-x) - 1)
// over a vertical trapezoid decomposition; exact up to log evaluations.
double cell_log_kernel_integral(const ConvexCell& cell);

// iint over Z(phi, A, band) of 1/(y-x); throws DiagonalContact when a
// piece of positive measure has its slope inside the band (the integral
// would diverge along the diagonal).
double z_region_integral(const PiecewiseFunction& phi, const IntervalUnion& A,
                         const ZBand& band);

struct TracePoint {
  double delta = 0, value = 0;
};

struct LiminfEstimate {
  std::vector<TracePoint> trace;  // delta -> (1/delta) * z_region_integral
  double surrogate = 0;           // min over the final third of the schedule
};

LiminfEstimate liminf_estimate(const PiecewiseFunction& phi, const IntervalUnion& A,
                               std::span<const double> delta_schedule);

// Lebesgue measure of the image of A under phi (finite interval unions:
// inner measure = measure); exact.
Rat image_inner_measure(const PiecewiseFunction& phi, const IntervalUnion& A);

struct LocVsGlobReport {
  double lhs = 0;    // liminf surrogate
  double rhs = 0;    // measure(A) - inner measure of the image
  double margin = 0; // lhs - rhs
  bool pass = false;
  std::vector<TracePoint> trace;
  nlohmann::json to_json() const;
};

LocVsGlobReport loc_vs_glob_check(const PiecewiseFunction& phi, const IntervalUnion& A,
                                  std::span<const double> delta_schedule,
                                  double rel_tol = 0.02);

struct LevelPoint {
  Rat x;
  Rat slope;  // g'(x) on the containing piece
};

// Solutions of g(x) = z inside the compact union K (closures of parts),
// one per piece, exact. Requires nonvanishing slopes on K.
std::vector<LevelPoint> level_set(const PiecewiseFunction& g, const IntervalUnion& K,
                                  const Rat& z);

struct CumulativeDistribution {
  PiecewiseFunction g;
  IntervalUnion K;
  Interval I;
};

// measure{x in I cap K : g(x) <= z}, exact interval algebra
Rat cumulative_value(const CumulativeDistribution& cd, const Rat& z);

// Values to exclude from regular-value tests: images of piece joints and
// of K-part endpoints, exact and sorted.
std::vector<Rat> exceptional_values(const CumulativeDistribution& cd);

struct CumDerivReport {
  double fd = 0;       // centered finite difference at the smallest step
  double formula = 0;  // sum of 1/|g'| over the level set inside I
  double gap = 0;
  std::vector<std::pair<double, double>> fd_trace;  // (h, fd)
};

CumDerivReport cumulative_derivative(const CumulativeDistribution& cd, const Rat& z,
                                     std::span<const double> h_schedule);

double p_of_z(const PiecewiseFunction& g, const IntervalUnion& K, const Rat& z);
Rat p_of_z_exact(const PiecewiseFunction& g, const IntervalUnion& K, const Rat& z);

// sum_{i<j} r_i r_j - (S - 1) for r_i in [0,1] with S = sum r_i >= 1;
// computed in exact rational arithmetic, nonnegative by the inequality.
Rat olimpico_margin_exact(std::span<const Rat> r);
double olimpico_check(std::span<const double> r);

struct GammaEstimate {
  double value = 0;  // omega at each cell's quotient midpoint
  double lower = 0;  // omega bracketed from below over the band
  double upper = 0;
  long long cells = 0;
};

// (1/delta) * iint_{Z(u, domain, [mu-delta, mu])} omega(Ru)/(y-x) for
// piecewise-constant u; cell geometry is exact, omega is bracketed over
// each cell's quotient range.
GammaEstimate gamma_estimate(const PiecewiseFunction& u, const Interval& domain,
                             const Weight& w, double mu, double delta);

struct GammaBoundRow {
  double mu = 0;
  double gamma_lower = 0, gamma_mid = 0, gamma_upper = 0;
  double bound = 0;  // J * omega(mu) / mu^2
  bool skipped = false;  // mu <= mu_0
  bool pass = false;
};

struct GammaBoundReport {
  std::vector<GammaBoundRow> rows;
  double M = 0, J = 0, eta0 = 0, mu0 = 0;
  bool pass = true;
  nlohmann::json to_json() const;
};

// Checks gamma_estimate(mu) >= J * omega(mu)/mu^2 for each mu > mu_0 with
// M, eta_0, mu_0 derived from u. J must satisfy the boundary-value
// admissibility (first piece below -J, last above +J).
GammaBoundReport gamma_lower_bound_check(const PiecewiseFunction& u, const Interval& domain,
                                         const Weight& w, std::span<const double> mu_list,
                                         double J, double delta = 1e-3);

// (a, b) minus S(eta): the set the proof machinery removes near the ends;
// exposed for the image-contraction estimate tests.
IntervalUnion contraction_domain(const PiecewiseFunction& u, const Interval& domain,
                                 double J, double mu);

}  // namespace dq

#endif
