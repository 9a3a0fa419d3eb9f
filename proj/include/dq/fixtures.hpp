#ifndef DQ_FIXTURES_HPP
#define DQ_FIXTURES_HPP

#include <random>

#include "dq/piecewise.hpp"

namespace dq::fixtures {

// Unit-slope contraction on (0, 1+ell): x on (0,1), x-1 on (1, 1+ell).
// Image is (0,1), so the contraction loss is exactly ell.
inline PiecewiseFunction toy_contraction(const Rat& ell) {
  Interval dom{Rat(0), 1 + ell};
  std::vector<Piece> pieces{
      Piece{Interval{Rat(0), Rat(1)}, PieceSpec::affine(1.0, 0.0)},
      Piece{Interval{Rat(1), 1 + ell}, PieceSpec::affine(1.0, -1.0)},
  };
  return PiecewiseFunction(dom, std::move(pieces));
}

inline PiecewiseFunction centered_heaviside() {
  return heaviside(Rat(-1), Rat(1), Rat(-1, 2), Rat(1, 2));
}

inline PiecewiseFunction staircase3() {
  return staircase(Interval{Rat(0), Rat(1)}, {Rat(-1), Rat(0), Rat(1)});
}

// dyadic rational in (0,1) with 20 random bits
inline Rat dyadic(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint64_t> bits(1, (1ull << 20) - 1);
  return Rat(static_cast<long>(bits(rng))) / Rat(std::int64_t(1) << 20);
}

// Random 3-piece function on (0,1) with slopes +-1 and images inside
// (0,1); the overlap of the piece images makes it a global contraction.
inline PiecewiseFunction random_unit_slope_shuffle(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Rat b1, b2;
  do {
    b1 = dyadic(rng);
    b2 = dyadic(rng);
    if (b2 < b1) std::swap(b1, b2);
  } while (b1 == b2);
  std::vector<Piece> pieces;
  const Rat cuts[4] = {Rat(0), b1, b2, Rat(1)};
  std::uniform_int_distribution<int> coin(0, 1);
  for (int k = 0; k < 3; ++k) {
    const Rat& lo = cuts[k];
    const Rat& hi = cuts[k + 1];
    bool up = coin(rng) == 1;
    // intercept range keeping the image inside (0,1)
    Rat q_lo = up ? Rat(-lo) : Rat(hi);
    Rat q_hi = up ? Rat(1 - hi) : Rat(1 + lo);
    Rat q = q_lo + (q_hi - q_lo) * dyadic(rng);
    pieces.push_back(Piece{Interval{lo, hi},
                           PieceSpec::affine(up ? 1.0 : -1.0, to_double(q))});
  }
  return PiecewiseFunction(Interval{Rat(0), Rat(1)}, std::move(pieces));
}

}  // namespace dq::fixtures

#endif
