#include <doctest.h>

#include <cmath>

#include "dq/engine.hpp"
#include "dq/fixtures.hpp"

using namespace dq;

namespace {
SequencePair default_seq() { return SequencePair(SequenceSpec::preset("default"), 64); }

Piece const_piece(double lo, double hi, const Rat& v) {
  return Piece{make_interval(lo, hi), PieceSpec::constant(v)};
}
}  // namespace

TEST_CASE("pair contribution: zero jump is free, unit jump matches ln(4/3)") {
  QuadratureConfig cfg;
  auto w = Weight::linear();
  auto p0 = const_piece(0, 1, Rat(5));
  auto p1 = const_piece(2, 3, Rat(5));
  CHECK(pair_contribution(p0, p1, w, cfg) == 0.0);

  auto p2 = const_piece(2, 3, Rat(6));  // jump 1
  double v = pair_contribution(p0, p2, w, cfg);
  CHECK(v == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-9));

  // swapped roles give the same value (the integrand is symmetric)
  CHECK(pair_contribution(p2, p0, w, cfg) == doctest::Approx(v).epsilon(1e-12));

  // Monte Carlo cross-check of the covariogram reduction
  auto mc = mc_rectangle(
      [](double x, double y) { return (1.0 / (y - x)) / (y - x); }, 0, 1, 2, 3, 4'000'000,
      31337, true);
  CHECK(std::fabs(mc.estimate - v) <= 3.0 * mc.std_error);
}

TEST_CASE("truncated functional of the heaviside jump") {
  QuadratureConfig cfg;
  Interval dom{Rat(-1), Rat(1)};
  auto u = heaviside(Rat(-1), Rat(1));

  // omega = mu^{1/2}: F^eps = 16 - 8 sqrt(2) - 4 sqrt(eps)
  auto wh = Weight::power_law(0.5);
  const double F = 16.0 - 8.0 * std::sqrt(2.0);
  for (double eps : {1.0 / 16, 1.0 / 256, 1.0 / 4096}) {
    double got = evaluate_truncated(u, wh, dom, eps, cfg);
    CHECK(got == doctest::Approx(F - 4.0 * std::sqrt(eps)).epsilon(1e-7));
  }

  // omega = mu: F^eps = 2 (ln(1/eps) + 1 - ln 2)
  auto wl = Weight::linear();
  for (double eps : {0.25, 1.0 / 64}) {
    double got = evaluate_truncated(u, wl, dom, eps, cfg);
    CHECK(got == doctest::Approx(2.0 * (std::log(1.0 / eps) + 1.0 - std::log(2.0)))
                     .epsilon(1e-9));
  }

  // constant u: identically zero
  auto c = staircase(dom, {Rat(7)});
  CHECK(evaluate_truncated(c, wl, dom, 0.125, cfg) == 0.0);

  CHECK_THROWS_AS(evaluate_truncated(u, wl, dom, 0.0, cfg), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_truncated(u, wl, dom, 5.0, cfg), std::invalid_argument);
}

TEST_CASE("monotone truncation trace and serial/parallel agreement") {
  QuadratureConfig cfg;
  Interval dom{Rat(-1), Rat(1)};
  auto u = heaviside(Rat(-1), Rat(1));
  auto w = Weight::power_law(0.5);
  double prev = -1;
  for (double eps : {0.5, 0.25, 0.125, 0.0625}) {
    double v = evaluate_truncated(u, w, dom, eps, cfg);
    CHECK(v >= prev);
    prev = v;
  }
  double par = evaluate_truncated(u, w, dom, 0.125, cfg, true);
  double ser = evaluate_truncated_serial(u, w, dom, 0.125, cfg);
  CHECK(par == ser);  // fixed summation order: bit-identical
}

TEST_CASE("unordered-pair evaluation equals twice the ordered sum") {
  QuadratureConfig cfg;
  auto w = Weight::power_law(0.5);
  std::vector<PiecewiseFunction> fixtures{
      heaviside(Rat(-1), Rat(1)),
      fixtures::staircase3(),
      staircase(Interval{Rat(0), Rat(1)}, {Rat(0), Rat(2), Rat(1), Rat(5)}),
  };
  for (const auto& u : fixtures) {
    const auto& pieces = u.pieces();
    double ordered = 0, unordered = 0;
    const double eps = 1.0 / 64;
    for (size_t i = 0; i < pieces.size(); ++i) {
      for (size_t j = 0; j < pieces.size(); ++j) {
        if (i == j) continue;
        double v = pair_contribution(pieces[i], pieces[j], w, cfg, eps);
        unordered += v;
        if (i < j) ordered += v;
      }
    }
    CHECK(std::fabs(unordered - 2.0 * ordered) <= 1e-10 * std::max(1.0, unordered));
  }
}

TEST_CASE("affine cross-cells go through 2-D quadrature and match Monte Carlo") {
  QuadratureConfig cfg;
  auto w = Weight::power_law(0.5);
  // unit-slope pieces with a jump at the joint, truncated at eps
  Piece left{make_interval(0.0, 1.0), PieceSpec::affine(1.0, 0.0)};
  Piece right{make_interval(1.0, 1.5), PieceSpec::affine(1.0, -1.0)};
  const double eps = 1.0 / 64;
  double v = pair_contribution(left, right, w, cfg, eps);
  CHECK(v > 0);
  auto mc = mc_rectangle(
      [&](double x, double y) {
        double t = y - x;
        if (t < eps) return 0.0;
        double q = std::fabs((y - 1.0) - x) / t;
        return std::sqrt(q) / t;
      },
      0, 1, 1, 1.5, 4'000'000, 555, true);
  CHECK(std::fabs(mc.estimate - v) <= 3.0 * mc.std_error);

  // mixed constant x affine cell
  Piece c{make_interval(2.0, 3.0), PieceSpec::constant(Rat(2))};
  double v2 = pair_contribution(left, c, w, cfg, eps);
  auto mc2 = mc_rectangle(
      [&](double x, double y) {
        double t = y - x;
        if (t < eps) return 0.0;
        double q = std::fabs(2.0 - x) / t;
        return std::sqrt(q) / t;
      },
      0, 1, 2, 3, 4'000'000, 556, true);
  CHECK(std::fabs(mc2.estimate - v2) <= 3.0 * mc2.std_error);
}

TEST_CASE("classification: the heaviside dichotomy") {
  QuadratureConfig cfg;
  Interval dom{Rat(-1), Rat(1)};
  auto u = heaviside(Rat(-1), Rat(1));
  auto schedule = geometric_eps_schedule(6, 20);

  auto fin = classify(u, Weight::power_law(0.5), dom, schedule, cfg);
  CHECK(fin.kind == FunctionalResult::Kind::Finite);
  CHECK(fin.value == doctest::Approx(16.0 - 8.0 * std::sqrt(2.0)).epsilon(2e-5));

  auto div = classify(u, Weight::linear(), dom, schedule, cfg);
  CHECK(div.kind == FunctionalResult::Kind::Divergent);
  CHECK(div.rate_model == FunctionalResult::RateModel::Logarithmic);
  CHECK(div.slope == doctest::Approx(2.0).epsilon(0.05));

  // power-rate divergence for super-linear weights
  auto pow = classify(u, Weight::power_law(2.0), dom, schedule, cfg);
  CHECK(pow.kind == FunctionalResult::Kind::Divergent);
  CHECK(pow.rate_model == FunctionalResult::RateModel::Power);

  // trace is monotone nondecreasing as eps decreases
  for (size_t k = 1; k < fin.epsilon_trace.size(); ++k)
    CHECK(fin.epsilon_trace[k].value >= fin.epsilon_trace[k - 1].value - 1e-12);

  CHECK_THROWS_AS(classify(u, Weight::linear(), dom, std::vector<double>{0.5, 0.25}, cfg),
                  std::invalid_argument);
}

TEST_CASE("classification: non-constant lipschitz diverges, constants stay at zero") {
  QuadratureConfig cfg;
  auto schedule = geometric_eps_schedule(6, 18);
  Interval dom{Rat(0), Rat(1)};
  auto lin = single_affine(dom, 1.0, 0.0);  // u(x) = x
  auto res = classify(lin, Weight::linear(), dom, schedule, cfg);
  CHECK(res.kind == FunctionalResult::Kind::Divergent);

  auto c = staircase(dom, {Rat(3)});
  auto zero = classify(c, Weight::linear(), dom, schedule, cfg);
  CHECK(zero.kind == FunctionalResult::Kind::Finite);
  CHECK(zero.value == 0.0);
}

TEST_CASE("counterexample weight diverges on the heaviside") {
  QuadratureConfig cfg;
  Interval dom{Rat(-1), Rat(1)};
  auto u = heaviside(Rat(-1), Rat(1));
  auto w = Weight::counterexample(default_seq());
  auto res = classify(u, w, dom, geometric_eps_schedule(6, 20), cfg);
  CHECK(res.kind == FunctionalResult::Kind::Divergent);
}

TEST_CASE("partial sums: monotone, dominated by the series bound, bit-stable") {
  QuadratureConfig cfg;
  auto seq = default_seq();
  auto w = Weight::counterexample(seq);
  auto rep = counterexample_partial_sum(seq, w, 7, cfg);
  REQUIRE(rep.rows.size() == 6);
  CHECK(rep.monotone);
  CHECK(rep.cell_bounds_ok);
  for (const auto& row : rep.rows) {
    CHECK(row.S_j >= 0);
    CHECK(row.S_j <= row.B_j + row.tail_bound);
  }
  // same-set cells contribute nothing (they are never enumerated; the
  // quotient there is 0 and omega(0) = 0), and S_j grows with j
  CHECK(rep.rows[1].S_j >= rep.rows[0].S_j);

  auto ser = counterexample_partial_sum_serial(seq, w, 7, cfg);
  for (size_t k = 0; k < rep.rows.size(); ++k) {
    CHECK(rep.rows[k].S_j == ser.rows[k].S_j);
  }
}

TEST_CASE("cell contributions respect the analytic block bound") {
  QuadratureConfig cfg;
  auto seq = default_seq();
  auto w = Weight::counterexample(seq);
  auto rep = counterexample_partial_sum(seq, w, 10, cfg);
  CHECK(rep.cell_bounds_ok);
  CHECK(rep.worst_cell_margin > 1.0);
}
