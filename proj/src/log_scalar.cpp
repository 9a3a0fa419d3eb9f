#include "dq/log_scalar.hpp"

#include <algorithm>
#include <stdexcept>

namespace dq {

LogScalar LogScalar::from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("LogScalar: non-finite input");
  LogScalar v;
  if (x == 0.0) return v;
  v.sign_ = x > 0 ? 1 : -1;
  v.log_ = std::log(std::fabs(x));
  v.cached_ = x;
  return v;
}

LogScalar LogScalar::from_log(int sign, double log_mag) {
  LogScalar v;
  if (sign == 0) return v;
  v.sign_ = sign > 0 ? 1 : -1;
  v.log_ = log_mag;
  return v;
}

LogScalar LogScalar::from_mpz(const mpz_class& z) {
  LogScalar v;
  int s = mpz_sgn(z.get_mpz_t());
  if (s == 0) return v;
  signed long exp2;
  double d = mpz_get_d_2exp(&exp2, z.get_mpz_t());
  v.sign_ = s;
  v.log_ = std::log(std::fabs(d)) + static_cast<double>(exp2) * M_LN2;
  double as_double = mpz_get_d(z.get_mpz_t());
  if (std::isfinite(as_double) && mpz_class(as_double) == z) v.cached_ = as_double;
  return v;
}

LogScalar LogScalar::from_rat(const Rat& q) {
  LogScalar num = from_mpz(q.get_num());
  LogScalar den = from_mpz(q.get_den());
  LogScalar v = num / den;
  double as_double = q.get_d();
  if (std::isfinite(as_double) && as_double != 0.0 && rat_from_double(as_double) == q)
    v.cached_ = as_double;
  return v;
}

double LogScalar::to_double() const {
  if (sign_ == 0) return 0.0;
  if (!std::isnan(cached_)) return cached_;
  return sign_ * std::exp(log_);
}

LogScalar LogScalar::operator-() const {
  LogScalar v = *this;
  v.sign_ = -v.sign_;
  if (!std::isnan(v.cached_)) v.cached_ = -v.cached_;
  return v;
}

LogScalar LogScalar::abs() const { return sign_ < 0 ? -*this : *this; }

LogScalar LogScalar::operator*(const LogScalar& o) const {
  if (sign_ == 0 || o.sign_ == 0) return zero();
  return from_log(sign_ * o.sign_, log_ + o.log_);
}

LogScalar LogScalar::operator/(const LogScalar& o) const {
  if (o.sign_ == 0) throw std::domain_error("LogScalar: division by zero");
  if (sign_ == 0) return zero();
  return from_log(sign_ * o.sign_, log_ - o.log_);
}

LogScalar LogScalar::pow(double e) const {
  if (sign_ < 0) throw std::domain_error("LogScalar::pow: negative base");
  if (sign_ == 0) return zero();
  return from_log(1, log_ * e);
}

LogScalar LogScalar::sum_same_sign(const LogScalar& a, const LogScalar& b) {
  // log-sum-exp on magnitudes
  double hi = std::max(a.log_, b.log_);
  double lo = std::min(a.log_, b.log_);
  return from_log(a.sign_, hi + std::log1p(std::exp(lo - hi)));
}

LogScalar LogScalar::operator+(const LogScalar& o) const {
  if (sign_ == 0) return o;
  if (o.sign_ == 0) return *this;
  if (sign_ == o.sign_) return sum_same_sign(*this, o);
  return log_sub_checked(*this, -o, 1e-12).value;
}

LogScalar LogScalar::operator-(const LogScalar& o) const { return *this + (-o); }

LogSubResult log_sub_checked(const LogScalar& a, const LogScalar& b,
                             double rel_threshold) {
  // computes a - b
  LogSubResult r;
  if (b.sign_ == 0) { r.value = a; return r; }
  if (a.sign_ == 0) { r.value = -b; return r; }
  if (a.sign_ != b.sign_) { r.value = LogScalar::sum_same_sign(a, -b); return r; }
  double d = a.log_ - b.log_;
  if (d == 0.0) { r.value = LogScalar::zero(); r.precision_loss = true; return r; }
  if (std::fabs(d) < rel_threshold) r.precision_loss = true;
  const LogScalar& big = std::fabs(d) == d ? a : b;
  int sign = (d > 0 ? a.sign_ : -a.sign_);
  // log(|a| - |b|) = log|big| + log(1 - exp(-|d|))
  double lg = big.log_ + std::log(-std::expm1(-std::fabs(d)));
  r.value = LogScalar::from_log(sign, lg);
  return r;
}

bool LogScalar::operator<(const LogScalar& o) const {
  if (sign_ != o.sign_) return sign_ < o.sign_;
  if (sign_ == 0) return false;
  if (sign_ > 0) return log_ < o.log_;
  return log_ > o.log_;
}

}  // namespace dq
