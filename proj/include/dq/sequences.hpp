#ifndef DQ_SEQUENCES_HPP
#define DQ_SEQUENCES_HPP

#include <string>
#include <vector>

#include "dq/log_scalar.hpp"
#include "dq/rational.hpp"

namespace dq {

// Exponent formulas for the two driving sequences:
//   log10 k_n = c2*n^2 + c1*n + c0,   mu_n = 3^{mu_pow3 * n} * k_n.
// The "default" preset is k_n = 10^{n^2}, mu_n = 3^n * 10^{n^2}.
struct SequenceSpec {
  int c2 = 1, c1 = 0, c0 = 0;
  int mu_pow3 = 1;
  std::string name = "default";

  static SequenceSpec preset(const std::string& name);
};

class SequencePair {
 public:
  explicit SequencePair(SequenceSpec spec = SequenceSpec{}, int n_max = 64);

  const SequenceSpec& spec() const { return spec_; }
  int n_max() const { return n_max_; }
  // largest n whose k_n, mu_n are materialized as exact big integers
  int exact_limit() const { return exact_limit_; }

  double log_k(int n) const;   // natural log
  double log_mu(int n) const;
  LogScalar k(int n) const { return LogScalar::from_log(1, log_k(n)); }
  LogScalar mu(int n) const { return LogScalar::from_log(1, log_mu(n)); }

  const mpz_class& k_exact(int n) const;   // 1 <= n <= exact_limit
  const mpz_class& mu_exact(int n) const;

  // k_j - k_i, exact when j <= exact_limit, else via log1p correction
  double log_k_gap(int i, int j) const;

 private:
  SequenceSpec spec_;
  int n_max_;
  int exact_limit_;
  std::vector<mpz_class> k_ex_, mu_ex_;  // index 0 unused
};

// n-th term of the convergence series  n^2 (2/3)^n exp((log mu_n)^{1/4}).
double series_term(const SequencePair& seq, int n);
// term_{n+1} / term_n
double series_ratio(const SequencePair& seq, int n);
// Geometric bound on sum_{n > N} of the series: term_{N+1} / (1 - r*)
// with r* the maximal ratio beyond N (+inf when r* >= 1).
double series_tail_bound(const SequencePair& seq, int N, int scan_to = 400);

struct SequenceConditionReport {
  struct Row {
    int n;
    bool mu_growth_ok;    // mu_n >= 3^n k_n
    bool k_step_ok;       // k_{n+1} >= k_n + mu_n + 3
    bool exact;           // checked with big integers
  };
  std::vector<Row> rows;
  bool all_ok = true;
  std::vector<double> partial_sums;  // S_1..S_N of the series
  double tail_bound_at_end = 0;      // bound on S_inf - S_N
  double max_ratio_beyond_end = 0;
  bool series_summable = false;      // max ratio beyond table < 1
};

SequenceConditionReport check_sequence_conditions(const SequencePair& seq, int n_max);

}  // namespace dq

#endif
