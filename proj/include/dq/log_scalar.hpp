#ifndef DQ_LOG_SCALAR_HPP
#define DQ_LOG_SCALAR_HPP

#include <cmath>
#include <limits>

#include "dq/rational.hpp"

namespace dq {

class LogScalar;
struct LogSubResult;

// a - b with a cancellation guard: same-sign operands whose magnitudes
// agree to better than rel_threshold are flagged, not rejected.
LogSubResult log_sub_checked(const LogScalar& a, const LogScalar& b,
                             double rel_threshold = 1e-12);

// Sign + natural-log magnitude representation for values like 10^{n^2}
// that overflow native floats. A construction-time double is cached so
// that round-trips through representable values lose nothing.
class LogScalar {
 public:
  LogScalar() = default;

  static LogScalar zero() { return LogScalar(); }
  static LogScalar from_double(double x);
  static LogScalar from_log(int sign, double log_mag);
  static LogScalar from_mpz(const mpz_class& z);
  static LogScalar from_rat(const Rat& q);

  int sign() const { return sign_; }
  bool is_zero() const { return sign_ == 0; }
  double log_mag() const { return log_; }
  double to_double() const;

  LogScalar operator-() const;
  LogScalar abs() const;
  LogScalar operator*(const LogScalar& o) const;
  LogScalar operator/(const LogScalar& o) const;
  LogScalar pow(double e) const;  // requires sign >= 0
  LogScalar operator+(const LogScalar& o) const;
  LogScalar operator-(const LogScalar& o) const;

  // value-order comparison (not log-order): handles signs
  bool operator<(const LogScalar& o) const;
  bool operator<=(const LogScalar& o) const { return !(o < *this); }

 private:
  int sign_ = 0;
  double log_ = -std::numeric_limits<double>::infinity();
  double cached_ = std::numeric_limits<double>::quiet_NaN();  // NaN: no cache

  static LogScalar sum_same_sign(const LogScalar& big, const LogScalar& small);

  friend struct LogSubResult;
  friend LogSubResult log_sub_checked(const LogScalar&, const LogScalar&, double);
};

struct LogSubResult {
  LogScalar value;
  bool precision_loss = false;  // operands agreed beyond the threshold
};

}  // namespace dq

#endif
