#ifndef DQ_RATIONAL_HPP
#define DQ_RATIONAL_HPP

#include <gmpxx.h>
#include <stdexcept>
#include <string>

namespace dq {

// Exact rational scalar used for all set geometry. Endpoints of Cantor
// pieces have denominator 3^n, which no binary float can carry.
using Rat = mpq_class;

inline double to_double(const Rat& q) { return q.get_d(); }

// mpq_class(num, den) does not canonicalize; routing variable numerators
// through this keeps mpq_equal-based comparisons sound.
inline Rat frac(long num, long den) {
  Rat q(num, den);
  q.canonicalize();
  return q;
}

// Every finite double is a dyadic rational, so this conversion is exact.
Rat rat_from_double(double x);

// Accepts "p/q", plain integers and decimal literals ("0.125").
Rat rat_parse(const std::string& s);

std::string rat_str(const Rat& q);

struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dq

#endif
