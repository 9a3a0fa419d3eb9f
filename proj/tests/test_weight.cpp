#include <doctest.h>

#include <cmath>
#include <random>

#include "dq/weight.hpp"

using namespace dq;

namespace {
Weight default_weight(int n_max = 64) {
  return Weight::counterexample(SequencePair(SequenceSpec::preset("default"), n_max));
}
}  // namespace

TEST_CASE("omega(0) = 0 and positivity for every family") {
  std::vector<Weight> families;
  families.push_back(Weight::power_law(0.5));
  families.push_back(Weight::linear());
  families.push_back(default_weight());
  families.push_back(Weight::table({{0, 0}, {1, 2}, {5, 1}}));
  for (const auto& w : families) {
    CHECK(w.eval(0.0) == 0.0);
    CHECK_THROWS_AS(w.eval(-1.0), std::domain_error);
    // positivity sampled up to mu = 10^300 in the log domain
    for (double lm = -5; lm <= 691; lm += 5.57) {
      auto v = w.eval_log(lm);
      CHECK(v.sign() == 1);
    }
  }
}

TEST_CASE("power law evaluation") {
  auto w = Weight::power_law(1.0);
  CHECK(w.eval(5.0) == doctest::Approx(5.0).epsilon(1e-15));
  auto h = Weight::power_law(0.5);
  CHECK(h.eval(9.0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK_THROWS_AS(Weight::power_law(0.0), std::invalid_argument);
}

TEST_CASE("counterexample weight hits its square windows") {
  auto w = default_weight();
  // mu_1 = 30: the square window [31, 32]
  CHECK(w.eval(31.5) == doctest::Approx(31.5 * 31.5).epsilon(1e-12));
  // exp branch on [33, mu_2]
  double mu = 5000.0;
  CHECK(w.eval(mu) == doctest::Approx(std::exp(std::pow(std::log(mu), 0.25))).epsilon(1e-12));
  // affine ramp on [0, 31]: omega = 31 mu
  CHECK(w.eval(10.0) == doctest::Approx(310.0).epsilon(1e-12));
}

TEST_CASE("log-domain evaluation inside a square window") {
  auto w = default_weight();
  // mu = mu_1 + 1.5 = 31.5: log omega = 2 log mu without forming mu^2
  double lm = std::log(31.5);
  CHECK(w.eval_log(lm).log_mag() == doctest::Approx(2.0 * lm).epsilon(1e-14));
}

TEST_CASE("log and linear evaluation agree where doubles reach") {
  auto w = default_weight();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> lmu(0.0, 690.0);
  for (int k = 0; k < 1000; ++k) {
    double lm = lmu(rng);
    double mu = std::exp(lm);
    double lin = w.eval(mu);
    if (!std::isfinite(lin) || lin <= 0) continue;
    double via_log = w.eval_log(lm).log_mag();
    CHECK(std::fabs(std::log(lin) - via_log) <= 1e-12 * std::max(1.0, std::fabs(via_log)));
  }
}

TEST_CASE("joint continuity at every window boundary, i <= 12") {
  auto w = default_weight();
  for (int i = 1; i <= 12; ++i) {
    for (double s : {0.0, 1.0, 2.0, 3.0}) {
      double left = w.log_omega_at_offset(i, s, -1);
      double right = w.log_omega_at_offset(i, s, +1);
      CHECK(std::fabs(left - right) <= 1e-12 * std::max(1.0, std::fabs(left)));
    }
  }
}

TEST_CASE("unit windows contribute exactly 1 to the integral condition") {
  auto w = default_weight();
  for (int i = 1; i <= 12; ++i) {
    CHECK(w.unit_window_integral(i) == 1.0);
  }
  // cross-check by generic quadrature while the window is resolvable
  auto r1 = w.integral_condition_partial(31.0, 32.0);
  CHECK(r1.value == doctest::Approx(1.0).epsilon(1e-12));
  auto r2 = w.integral_condition_partial(90001.0, 90002.0);  // mu_2 = 9e4
  CHECK(r2.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("integral condition closed forms for power laws") {
  auto w1 = Weight::power_law(1.0);
  auto r = w1.integral_condition_partial(1.0, std::exp(1.0));
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-14));

  auto wh = Weight::power_law(0.5);
  for (double M : {10.0, 1e4, 1e8}) {
    auto v = wh.integral_condition_partial(1.0, M);
    CHECK(v.value == doctest::Approx(2.0 * (1.0 - 1.0 / std::sqrt(M))).epsilon(1e-13));
  }
  // bounded by 2: the integral condition fails for theta = 1/2
  CHECK(wh.integral_condition_partial(1.0, 1e12).value < 2.0);
}

TEST_CASE("partial integrals are additive over adjacent ranges") {
  auto w = default_weight();
  double a = 1.0, m = 40.0, b = 5000.0;
  double whole = w.integral_condition_partial(a, b).value;
  double split = w.integral_condition_partial(a, m).value +
                 w.integral_condition_partial(m, b).value;
  CHECK(std::fabs(whole - split) < 1e-10);

  auto wp = Weight::power_law(0.5);
  double whole2 = wp.integral_condition_partial(1.0, 100.0).value;
  double split2 = wp.integral_condition_partial(1.0, 7.0).value +
                  wp.integral_condition_partial(7.0, 100.0).value;
  CHECK(std::fabs(whole2 - split2) < 1e-10);
}

TEST_CASE("first N unit windows push the partial integral above N") {
  auto w = default_weight();
  int N = 12;
  double sum = 0;
  for (int i = 1; i <= N; ++i) sum += w.unit_window_integral(i);
  CHECK(sum == doctest::Approx(static_cast<double>(N)));
  // everything else in the integrand is nonnegative, so the partial
  // integral over [1, mu_N + 2] dominates N; check a resolvable stretch
  double partial = w.integral_condition_partial(1.0, 90002.0).value;  // [1, mu_2+2]
  CHECK(partial >= 2.0);

  // across the full double range the integral picks up one unit from
  // every window below 1e300, collapsed ones included (mu_17 ~ 1.3e297),
  // on top of the ramp part int_1^31 (mu_1+1)/mu = 31 ln 31
  double wide = w.integral_condition_partial(1.0, 1e300).value;
  CHECK(wide >= 17.0 + 31.0 * std::log(31.0) - 1.0);
  CHECK(wide < 160.0);
}

TEST_CASE("growth check: omega outgrows every power of log mu") {
  auto w = default_weight();
  std::vector<double> grid{1e2, 1e4, 1e6};
  auto rep = growth_check(w, 1.0, grid);
  CHECK(rep.strictly_increasing);
  CHECK(rep.gap.back() > rep.gap.front());
  CHECK(rep.gap.back() > 0);

  // the gap (log mu)^{1/4} - theta log log mu turns increasing only past
  // log mu = (4 theta)^4, so the theta = 4 grid starts beyond 65536
  auto rep4 = growth_check(w, 4.0, std::vector<double>{1e5, 1e6, 1e7, 1e8});
  CHECK(rep4.strictly_increasing);

  auto lin = growth_check(Weight::power_law(1.0), 1.0, grid);
  CHECK(lin.strictly_increasing);

  CHECK_THROWS_AS(growth_check(w, 1.0, std::vector<double>{1e4, 1e2}),
                  std::invalid_argument);
}

TEST_CASE("weight config round-trip") {
  auto w = Weight::from_json({{"family", "powerlaw"}, {"theta", 0.5}});
  CHECK(w.family() == Weight::Family::PowerLaw);
  CHECK(w.eval(4.0) == doctest::Approx(2.0));

  nlohmann::json jc = {{"family", "counterexample"},
                       {"sequence", {{"preset", "default"}, {"n_max", 32}}}};
  auto wc = Weight::from_json(jc);
  CHECK(wc.family() == Weight::Family::CounterexampleOmega);
  CHECK(wc.eval(31.5) == doctest::Approx(31.5 * 31.5));
  auto round = Weight::from_json(wc.to_json());
  CHECK(round.eval(31.5) == doctest::Approx(31.5 * 31.5));

  CHECK_THROWS_AS(Weight::from_json({{"family", "nope"}}), std::invalid_argument);
}
