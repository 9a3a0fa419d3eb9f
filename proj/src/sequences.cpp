#include "dq/sequences.hpp"

#include <cmath>
#include <stdexcept>

namespace dq {

namespace {
constexpr double kLn10 = 2.302585092994045684;
constexpr double kLn3 = 1.0986122886681098;
constexpr int kMaxExactExponent = 600;  // 10^600 stays cheap as an mpz
}  // namespace

SequenceSpec SequenceSpec::preset(const std::string& name) {
  if (name == "default") return SequenceSpec{1, 0, 0, 1, "default"};
  // under-growing sequence: k_n = 10^n, violates the step condition at n = 2
  if (name == "small") return SequenceSpec{0, 1, 0, 1, "small"};
  // frozen sequence: k_{n+1} = k_n, violates the step condition everywhere
  if (name == "constant") return SequenceSpec{0, 0, 1, 1, "constant"};
  throw std::invalid_argument("unknown sequence preset: " + name);
}

SequencePair::SequencePair(SequenceSpec spec, int n_max)
    : spec_(spec), n_max_(n_max) {
  if (n_max_ < 1) throw std::invalid_argument("SequencePair: n_max >= 1");
  exact_limit_ = 0;
  for (int n = 1; n <= n_max_; ++n) {
    long e10 = static_cast<long>(spec_.c2) * n * n + static_cast<long>(spec_.c1) * n + spec_.c0;
    if (e10 < 0 || e10 > kMaxExactExponent) break;
    exact_limit_ = n;
  }
  k_ex_.resize(exact_limit_ + 1);
  mu_ex_.resize(exact_limit_ + 1);
  for (int n = 1; n <= exact_limit_; ++n) {
    long e10 = static_cast<long>(spec_.c2) * n * n + static_cast<long>(spec_.c1) * n + spec_.c0;
    mpz_class k;
    mpz_ui_pow_ui(k.get_mpz_t(), 10, static_cast<unsigned long>(e10));
    mpz_class p3;
    mpz_ui_pow_ui(p3.get_mpz_t(), 3, static_cast<unsigned long>(spec_.mu_pow3) * n);
    k_ex_[n] = k;
    mu_ex_[n] = k * p3;
  }
}

double SequencePair::log_k(int n) const {
  if (n < 1) throw std::invalid_argument("log_k: n >= 1");
  double e10 = static_cast<double>(spec_.c2) * n * n + static_cast<double>(spec_.c1) * n + spec_.c0;
  return e10 * kLn10;
}

double SequencePair::log_mu(int n) const {
  return log_k(n) + static_cast<double>(spec_.mu_pow3) * n * kLn3;
}

const mpz_class& SequencePair::k_exact(int n) const {
  if (n < 1 || n > exact_limit_) throw std::out_of_range("k_exact: n beyond exact limit");
  return k_ex_[n];
}

const mpz_class& SequencePair::mu_exact(int n) const {
  if (n < 1 || n > exact_limit_) throw std::out_of_range("mu_exact: n beyond exact limit");
  return mu_ex_[n];
}

double SequencePair::log_k_gap(int i, int j) const {
  if (!(1 <= i && i < j)) throw std::invalid_argument("log_k_gap: requires 1 <= i < j");
  if (j <= exact_limit_) {
    mpz_class gap = k_ex_[j] - k_ex_[i];
    return LogScalar::from_mpz(gap).log_mag();
  }
  double d = log_k(i) - log_k(j);  // very negative
  double ratio = d < -745 ? 0.0 : std::exp(d);
  return log_k(j) + std::log1p(-ratio);
}

double series_term(const SequencePair& seq, int n) {
  double lg = 2 * std::log(static_cast<double>(n)) + n * std::log(2.0 / 3.0) +
              std::pow(seq.log_mu(n), 0.25);
  return std::exp(lg);
}

double series_ratio(const SequencePair& seq, int n) {
  return series_term(seq, n + 1) / series_term(seq, n);
}

double series_tail_bound(const SequencePair& seq, int N, int scan_to) {
  // the term ratio can sit above 1 for small n; sum those terms
  // explicitly and only start the geometric bound past the settle point
  int settle = std::max(N, 20);
  double explicit_part = 0;
  for (int n = N + 1; n <= settle; ++n) explicit_part += series_term(seq, n);
  double rmax = 0;
  for (int n = settle + 1; n <= scan_to; ++n) rmax = std::max(rmax, series_ratio(seq, n));
  // the ratio must be decreasing where the scan stops, else the scan is
  // too short to certify a geometric tail
  if (series_ratio(seq, scan_to) > series_ratio(seq, scan_to - 1) || rmax >= 1.0)
    return std::numeric_limits<double>::infinity();
  return explicit_part + series_term(seq, settle + 1) / (1.0 - rmax);
}

SequenceConditionReport check_sequence_conditions(const SequencePair& seq, int n_max) {
  if (n_max > seq.n_max()) throw std::invalid_argument("check_sequence_conditions: n_max too large");
  SequenceConditionReport rep;
  const double log_tol = 1e-9;
  for (int n = 1; n <= n_max; ++n) {
    SequenceConditionReport::Row row{};
    row.n = n;
    bool exact = n + 1 <= seq.exact_limit();
    row.exact = exact;
    if (exact) {
      mpz_class p3;
      mpz_ui_pow_ui(p3.get_mpz_t(), 3, static_cast<unsigned long>(n));
      row.mu_growth_ok = seq.mu_exact(n) >= p3 * seq.k_exact(n);
      row.k_step_ok = seq.k_exact(n + 1) >= seq.k_exact(n) + seq.mu_exact(n) + 3;
    } else {
      row.mu_growth_ok = seq.log_mu(n) >= n * std::log(3.0) + seq.log_k(n) - log_tol;
      LogScalar rhs = seq.k(n) + seq.mu(n) + LogScalar::from_double(3.0);
      row.k_step_ok = seq.log_k(n + 1) >= rhs.log_mag() - log_tol;
    }
    rep.all_ok = rep.all_ok && row.mu_growth_ok && row.k_step_ok;
    rep.rows.push_back(row);
  }
  double s = 0;
  for (int n = 1; n <= n_max; ++n) {
    s += series_term(seq, n);
    rep.partial_sums.push_back(s);
  }
  rep.tail_bound_at_end = series_tail_bound(seq, n_max);
  double rmax = 0;
  for (int n = n_max + 1; n <= 400; ++n) rmax = std::max(rmax, series_ratio(seq, n));
  rep.max_ratio_beyond_end = rmax;
  rep.series_summable = std::isfinite(rep.tail_bound_at_end);
  return rep;
}

}  // namespace dq
