#ifndef DQ_ENGINE_HPP
#define DQ_ENGINE_HPP

#include <span>
#include <vector>

#include <json.hpp>

#include "dq/covariogram.hpp"
#include "dq/piecewise.hpp"
#include "dq/quadrature.hpp"
#include "dq/weight.hpp"

namespace dq {

struct NonConvergent : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EpsTracePoint {
  double eps = 0;
  double value = 0;
};

struct FunctionalResult {
  enum class Kind { Finite, Divergent, Inconclusive } kind = Kind::Inconclusive;
  enum class RateModel { Logarithmic, Power } rate_model = RateModel::Logarithmic;
  double value = 0;       // Finite: extrapolated limit
  double error_bound = 0;
  double slope = 0;       // Divergent: dF / d ln(1/eps)
  std::vector<EpsTracePoint> epsilon_trace;
  long long cells_evaluated = 0;
  double wall_time_ms = 0;

  nlohmann::json to_json() const;
};

// iint over the product of two disjoint piece cells of
//   omega(|u(y)-u(x)| / |y-x|) / |y-x|,
// restricted to |y-x| >= eps. Constant x constant cells reduce through the
// covariogram to a 1-D integral; cells with an affine side go through 2-D
// adaptive quadrature.
double pair_contribution(const Piece& px, const Piece& py, const Weight& w,
                         const QuadratureConfig& cfg, double eps = 0.0);

// F^eps over domain x domain (the factor 2 restores the Omega x Omega
// convention from the internal ordered-pair sums).
double evaluate_truncated(const PiecewiseFunction& u, const Weight& w,
                          const Interval& domain, double eps, const QuadratureConfig& cfg,
                          bool parallel = true);
double evaluate_truncated_serial(const PiecewiseFunction& u, const Weight& w,
                                 const Interval& domain, double eps,
                                 const QuadratureConfig& cfg);

// Fits the truncation trace against ln(1/eps): geometric decay of the
// increments means a Cauchy trace (Finite, with a geometric-tail
// extrapolation); a slope above the threshold with non-decaying increments
// means Divergent. The Cauchy cutoff is an increment ratio of 0.95 per
// halving, so weights converging slower than eps^{0.07} (power laws with
// theta above ~0.93) need a deeper schedule to classify correctly.
FunctionalResult classify(const PiecewiseFunction& u, const Weight& w,
                          const Interval& domain, std::span<const double> eps_schedule,
                          const QuadratureConfig& cfg);

std::vector<double> geometric_eps_schedule(int k_lo, int k_hi);  // eps = 2^-k

struct PartialSumRow {
  int j = 0;
  double S_j = 0;          // 2 sum_{i<j'<=j} of the A_i x A_j' contributions
  double B_j = 0;          // 4 sum_{j'<=j} j'^2 (2/3)^j' exp((log mu_j')^{1/4})
  double tail_bound = 0;   // geometric bound on the series tail beyond j
};

struct PartialSumReport {
  std::vector<PartialSumRow> rows;
  bool monotone = true;
  bool cell_bounds_ok = true;      // every (i,j) block under its analytic bound
  double worst_cell_margin = 0;    // min over blocks of bound/computed
  long long cells = 0;
  double wall_time_ms = 0;
  nlohmann::json to_json() const;
};

// The double-sum experiment: S_J over cells A_i x A_j, i < j <= J_max,
// with omega evaluated in the log domain and each interval pair reduced
// through its covariogram.
PartialSumReport counterexample_partial_sum(const SequencePair& seq, const Weight& w,
                                            int J_max, const QuadratureConfig& cfg,
                                            bool parallel = true);
PartialSumReport counterexample_partial_sum_serial(const SequencePair& seq, const Weight& w,
                                                   int J_max, const QuadratureConfig& cfg);

// Single constant-constant cell via covariogram reduction (exposed for the
// serial/parallel agreement tests and the benchmark).
double constant_cell_contribution(double gap, double len_left, double len_right,
                                  double log_delta, const Weight& w,
                                  const QuadratureConfig& cfg, double eps = 0.0);

}  // namespace dq

#endif
