#include "dq/rational.hpp"

#include <cmath>

namespace dq {

Rat rat_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("rat_from_double: non-finite input");
  Rat q;
  mpq_set_d(q.get_mpq_t(), x);
  return q;
}

Rat rat_parse(const std::string& s) {
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Rat q(s);
    q.canonicalize();
    return q;
  }
  auto dot = s.find('.');
  if (dot == std::string::npos) {
    Rat q(s);
    q.canonicalize();
    return q;
  }
  // decimal literal: digits.digits -> (digits concatenated) / 10^frac_len
  std::string digits = s.substr(0, dot) + s.substr(dot + 1);
  size_t frac_len = s.size() - dot - 1;
  mpz_class num(digits);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
  Rat q(num, den);
  q.canonicalize();
  return q;
}

std::string rat_str(const Rat& q) { return q.get_str(); }

}  // namespace dq
