#ifndef DQ_PIECEWISE_HPP
#define DQ_PIECEWISE_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dq/interval.hpp"
#include "dq/log_scalar.hpp"
#include "dq/sequences.hpp"

namespace dq {

// Raised when evaluation lands in the null-set complement (e.g. a point
// of the Cantor set, where the construction assigns no value).
struct UnassignedPoint : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PieceSpec {
  enum class Kind { Constant, Affine } kind = Kind::Constant;
  // Constant: value in log form, with an exact twin when available
  LogScalar value;
  std::optional<Rat> value_exact;
  // Affine: native-float slope/intercept (these feed quadrature only)
  double slope = 0, intercept = 0;

  static PieceSpec constant(const Rat& v);
  static PieceSpec constant_log(LogScalar v);
  static PieceSpec affine(double slope, double intercept);
};

struct Piece {
  Interval dom;
  PieceSpec spec;
};

// Finite list of (interval, constant-or-affine) pieces inside a domain
// interval. Pieces are disjoint; whatever measure they do not cover is
// the explicit exact-rational null budget (0 for most fixtures, (2/3)^n
// for the truncated Cantor construction).
class PiecewiseFunction {
 public:
  PiecewiseFunction(Interval domain, std::vector<Piece> pieces);

  const Interval& domain() const { return domain_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  const Rat& null_budget() const { return null_budget_; }

  const Piece* piece_at(const Rat& x) const;  // nullptr when unassigned
  LogScalar eval(const Rat& x) const;         // throws UnassignedPoint
  std::optional<Rat> eval_exact(const Rat& x) const;
  double eval_double(double x) const;

  PiecewiseFunction restricted(const Interval& window) const;

  nlohmann::json to_json() const;
  static PiecewiseFunction from_json(const nlohmann::json& j);

 private:
  Interval domain_;
  std::vector<Piece> pieces_;  // sorted by dom.lo
  Rat null_budget_;
};

struct DifferenceQuotient {
  LogScalar value;
  std::optional<Rat> exact;
  Rat x, y;
};

// (u(y) - u(x)) / (y - x), exact whenever both endpoint values are exact
// rationals, otherwise carried in the log domain.
DifferenceQuotient difference_quotient(const PiecewiseFunction& u, const Rat& x,
                                       const Rat& y);

// u = k_n on every component of A_n, n <= n_max; unassigned on the rest.
PiecewiseFunction build_cantor_function(const SequencePair& seq, int n_max,
                                        int depth_cap = 24);

// jump function: lo_val on (a, 0), hi_val on (0, b); requires a < 0 < b
PiecewiseFunction heaviside(const Rat& a, const Rat& b, const Rat& lo_val = Rat(0),
                            const Rat& hi_val = Rat(1));

// equal-width constant steps over the domain
PiecewiseFunction staircase(const Interval& domain, const std::vector<Rat>& values);

PiecewiseFunction single_affine(const Interval& domain, double slope, double intercept);

// phi_mu(x) = x - u(x)/mu; constant pieces become unit-slope affine pieces
PiecewiseFunction build_phi_mu(const PiecewiseFunction& u, double mu);

struct QuotientBoundsReport {
  int i = 0, j = 0;
  long long checked = 0;
  long long violations = 0;
  // worst multiplicative margins (>= 1 means the bound holds)
  double min_lower_ratio = 0;  // min over pairs of quotient / (mu_{j-1} + 3)
  double min_upper_ratio = 0;  // min over pairs of mu_j / quotient
};

// Exhaustive endpoint combinations of every interval pair of A_i x A_j,
// plus `samples` seeded dyadic interior pairs, all in exact big-rational
// arithmetic, checked against mu_{j-1} + 3 <= |Ru| <= mu_j.
QuotientBoundsReport quotient_bounds_check(const SequencePair& seq, int i, int j,
                                           int samples, std::uint64_t seed);

}  // namespace dq

#endif
