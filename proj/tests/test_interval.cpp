#include <doctest.h>

#include <random>

#include "dq/covariogram.hpp"
#include "dq/interval.hpp"
#include "dq/quadrature.hpp"
#include "support.hpp"

using namespace dq;

TEST_CASE("make_union normalizes and preserves measure") {
  auto u = IntervalUnion::from({make_interval(Rat(0), Rat(1)), make_interval(Rat(2), Rat(3))});
  CHECK(u.size() == 2);
  CHECK(u.measure() == Rat(2));

  auto merged = IntervalUnion::from({make_interval(Rat(0), Rat(1)),
                                     make_interval(Rat(1, 2), Rat(2))});
  CHECK(merged.size() == 1);
  CHECK(merged.parts()[0].lo == Rat(0));
  CHECK(merged.parts()[0].hi == Rat(2));
  CHECK(merged.measure() == Rat(2));

  // touching intervals merge too
  auto touching = IntervalUnion::from({make_interval(Rat(0), Rat(1)),
                                       make_interval(Rat(1), Rat(2))});
  CHECK(touching.size() == 1);

  CHECK_THROWS_AS(make_interval(Rat(1), Rat(1)), std::invalid_argument);
  CHECK_THROWS_AS(make_interval(Rat(2), Rat(1)), std::invalid_argument);
}

TEST_CASE("cantor_removed base cases") {
  auto a1 = cantor_removed(1);
  REQUIRE(a1.size() == 1);
  CHECK(a1.parts()[0].lo == Rat(1, 3));
  CHECK(a1.parts()[0].hi == Rat(2, 3));

  auto a2 = cantor_removed(2);
  REQUIRE(a2.size() == 2);
  CHECK(a2.parts()[0].lo == Rat(1, 9));
  CHECK(a2.parts()[0].hi == Rat(2, 9));
  CHECK(a2.parts()[1].lo == Rat(7, 9));
  CHECK(a2.parts()[1].hi == Rat(8, 9));

  CHECK_THROWS_AS(cantor_removed(0), std::invalid_argument);
  CHECK_THROWS_AS(cantor_removed(25), ResourceError);
}

TEST_CASE("cantor measures are exactly (1/2)(2/3)^n") {
  Rat sum = 0;
  Rat pow23(1);
  for (int n = 1; n <= 20; ++n) {
    pow23 *= Rat(2, 3);
    auto an = cantor_removed(n);
    CHECK(an.size() == (size_t{1} << (n - 1)));
    CHECK(an.measure() == pow23 / 2);
    if (n <= 12) sum += an.measure();
  }
  // partial sums telescope: sum_{n<=N} = 1 - (2/3)^N
  Rat p(1);
  for (int n = 1; n <= 12; ++n) p *= Rat(2, 3);
  CHECK(sum == 1 - p);
}

TEST_CASE("cantor steps are pairwise disjoint") {
  for (int i = 1; i <= 10; ++i) {
    auto ai = cantor_removed(i);
    for (int j = i + 1; j <= 10; ++j) {
      CHECK(ai.disjoint_from(cantor_removed(j)));
    }
  }
}

TEST_CASE("union_distance on cantor steps is 3^{-max(i,j)}") {
  auto a1 = cantor_removed(1);
  CHECK(union_distance(a1, cantor_removed(2)) == Rat(1, 9));
  CHECK(union_distance(a1, a1) == Rat(0));

  std::vector<IntervalUnion> steps;
  for (int n = 1; n <= 12; ++n) steps.push_back(cantor_removed(n));
  Rat pow3(1);
  std::vector<Rat> p3{Rat(1)};
  for (int n = 1; n <= 12; ++n) {
    pow3 /= 3;
    p3.push_back(pow3);
  }
  for (int i = 1; i <= 12; ++i)
    for (int j = i + 1; j <= 12; ++j)
      CHECK(union_distance(steps[i - 1], steps[j - 1]) == p3[j]);

  CHECK_THROWS_AS(union_distance(IntervalUnion{}, a1), std::invalid_argument);
}

TEST_CASE("covariogram of unit intervals is the unit tent") {
  auto cg = covariogram(make_interval(Rat(0), Rat(1)), make_interval(Rat(2), Rat(3)));
  CHECK(cg.support_lo() == doctest::Approx(1.0));
  CHECK(cg.support_hi() == doctest::Approx(3.0));
  CHECK(cg.value(2.0) == doctest::Approx(1.0));
  CHECK(cg.value(1.5) == doctest::Approx(0.5));
  CHECK(cg.mass_exact() == Rat(1));

  // int lambda/t dt = 3 ln 3 - 4 ln 2
  double v = integrate_lambda_over_t(cg, 0.0, 10.0);
  CHECK(v == doctest::Approx(0.5232481437645478).epsilon(1e-12));
  // int lambda/t^2 dt = ln(4/3)
  double v2 = integrate_lambda_over_t2(cg, 0.5, 10.0);
  CHECK(v2 == doctest::Approx(0.2876820724517809).epsilon(1e-12));

  CHECK_THROWS_AS(covariogram(make_interval(Rat(0), Rat(2)), make_interval(Rat(1), Rat(3))),
                  std::invalid_argument);
}

TEST_CASE("covariogram mass equals |I||J| on random rational pairs") {
  std::mt19937_64 rng(20240811);
  for (int k = 0; k < 1000; ++k) {
    Rat a = dq::testing::random_rat(rng);
    Rat b = a + dq::testing::random_rat(rng) + Rat(1, 1000);
    Rat c = b + dq::testing::random_rat(rng);  // gap >= 0 (touching allowed)
    Rat d = c + dq::testing::random_rat(rng) + Rat(1, 1000);
    Interval I{a, b}, J{c, d};
    auto cg = covariogram(I, J);
    CHECK(cg.mass_exact() == I.length() * J.length());
  }
}

TEST_CASE("covariogram reduction agrees with 2-D Monte Carlo for f = 1/t") {
  Interval I = make_interval(Rat(0), Rat(1));
  Interval J = make_interval(Rat(2), Rat(3));
  auto cg = covariogram(I, J);
  double reduced = integrate_lambda_over_t(cg, 0.0, 10.0);
  auto mc = mc_rectangle([](double x, double y) { return 1.0 / (y - x); }, 0, 1, 2, 3,
                         10'000'000, 424242, true);
  CHECK(std::fabs(mc.estimate - reduced) <= 3.0 * mc.std_error);
  CHECK(std::fabs(mc.estimate - reduced) / reduced < 1e-3);

  // chunk-seeded: serial result is bit-identical to the parallel one
  auto mc_serial = mc_rectangle_serial([](double x, double y) { return 1.0 / (y - x); }, 0,
                                       1, 2, 3, 1'000'000, 7);
  auto mc_par = mc_rectangle([](double x, double y) { return 1.0 / (y - x); }, 0, 1, 2, 3,
                             1'000'000, 7, true);
  CHECK(mc_serial.estimate == mc_par.estimate);
  CHECK(mc_serial.std_error == mc_par.std_error);
}
