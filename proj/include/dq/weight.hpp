#ifndef DQ_WEIGHT_HPP
#define DQ_WEIGHT_HPP

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dq/log_scalar.hpp"
#include "dq/sequences.hpp"

namespace dq {

struct IntegralResult {
  double value = 0;
  double err_bound = 0;
};

// Weight family omega: continuous, omega(0) = 0, positive on (0, inf).
//
// CounterexampleOmega alternates, for each index i >= 1,
//   omega(mu) = mu^2                 on [mu_i + 1, mu_i + 2]
//   omega(mu) = exp((log mu)^{1/4})  on [mu_i + 3, mu_{i+1}]
// with affine interpolation on [0, mu_1 + 1], [mu_i, mu_i + 1] and
// [mu_i + 2, mu_i + 3]. Evaluation works in the log domain because mu_n
// overflows native floats from n = 18 on; glue-zone interiors are only
// addressable while a width-1 window is resolvable in double (small i),
// beyond that the windows collapse onto log(mu_i) and the exp branch is
// the continuous convention at the collapsed point.
class Weight {
 public:
  enum class Family { PowerLaw, Linear, CounterexampleOmega, PiecewiseTable };

  static Weight power_law(double theta);
  static Weight linear();
  static Weight counterexample(SequencePair seq, int n_segments = 1200);
  static Weight table(std::vector<std::pair<double, double>> knots);
  static Weight from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  Family family() const { return family_; }
  double theta() const { return theta_; }
  const SequencePair& sequence() const;

  // linear-domain evaluation (may overflow to +inf for huge mu)
  double eval(double mu) const;
  // log-domain evaluation, never forms mu
  LogScalar eval_log(double log_mu) const;

  // log-positions of omega's segment joints inside (log_lo, log_hi)
  std::vector<double> breakpoints_log(double log_lo, double log_hi) const;
  // min/max of omega over [exp(log_lo), exp(log_hi)]
  std::pair<LogScalar, LogScalar> range_log(double log_lo, double log_hi) const;

  // int_{mu_lo}^{mu_hi} omega(mu)/mu^2 dmu, closed forms per segment plus
  // adaptive quadrature on the exp segments
  IntegralResult integral_condition_partial(double mu_lo, double mu_hi) const;
  // the same integral over the window [mu_i + 1, mu_i + 2]; equals the
  // window width, i.e. exactly 1 (counterexample family only)
  double unit_window_integral(int i) const;

  // evaluate log(omega) at mu = mu_i + s without forming mu (counterexample
  // family); at a joint, side < 0 evaluates the left segment's formula and
  // side > 0 the right one, which is how joint continuity gets tested
  double log_omega_at_offset(int i, double s, int side = 1) const;

 private:
  Weight() = default;

  struct Seg {
    enum Kind { Ramp, Square, Glue, Exp } kind;
    double log_lo, log_hi;
    int i;                 // anchoring sequence index
    double s_lo, s_hi;     // offsets from mu_i covered by this segment
    double w_lo_log, w_hi_log;  // log endpoint values (Glue)
    double mu_base;        // exp(log mu_i) when finite, else +inf
  };

  void build_counterexample_segments(int n_segments);
  const Seg& segment_for(double log_mu) const;
  LogScalar eval_log_counterexample(double log_mu) const;

  Family family_ = Family::Linear;
  double theta_ = 1.0;
  std::optional<SequencePair> seq_;
  std::vector<Seg> segs_;
  std::vector<double> seg_hi_;  // log_hi per segment, for binary search
  std::vector<std::pair<double, double>> knots_;  // PiecewiseTable
};

struct GrowthReport {
  double theta = 0;
  std::vector<double> log_mu;
  std::vector<double> gap;  // log omega(mu) - theta * log log mu
  bool strictly_increasing = false;
};

// Divergence evidence for omega(mu) / (log mu)^theta along a grid.
GrowthReport growth_check(const Weight& w, double theta, std::span<const double> log_mu_grid);

}  // namespace dq

#endif
