#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "heatlab/growth.hpp"

using namespace heatlab;

TEST_CASE("growth: nonpositive constants bound but do not weigh") {
  const auto c = GrowthFunction::constant(-2.5);
  CHECK(c.eval(3.0) == -2.5);
  CHECK_FALSE(c.positive());
  CHECK(GrowthFunction::constant(0.1).positive());
  CHECK_THROWS_AS(osgood_integral(c, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(classify_osgood(c), std::invalid_argument);
  CHECK_THROWS_AS(GrowthFunction::constant(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(CurvatureFunction(family::Constant{-1.0}), std::invalid_argument);
}

TEST_CASE("growth: eval") {
  CHECK(GrowthFunction::power(1, 2).eval(3.0) == doctest::Approx(9.0));
  CHECK(GrowthFunction::constant(5).eval(17.0) == 5.0);
  const auto k = CurvatureFunction(family::Power{1, 1});
  CHECK(GrowthFunction::from_curvature(1, k).eval(2.0) == doctest::Approx(8.0));
  const auto pl = GrowthFunction::power_log(2, 1, 2);
  const double r = 5.0;
  CHECK(pl.eval(r) == doctest::Approx(2 * r * std::pow(std::log(std::numbers::e + r), 2)));
  CHECK(std::exp(pl.ln_eval(std::log(r))) == doctest::Approx(pl.eval(r)).epsilon(1e-13));
  // ln_eval stays finite far beyond double range of L itself
  CHECK(GrowthFunction::power(1, 3).ln_eval(1000.0) == doctest::Approx(3000.0));
}

TEST_CASE("growth: tables") {
  const auto t = GrowthFunction::table({{1, 1}, {2, 3}, {4, 4}});
  CHECK(t.eval(0.5) == 1.0);
  CHECK(t.eval(1.5) == doctest::Approx(2.0));
  CHECK(t.eval(6.0) == doctest::Approx(5.0));  // slope 1/2 extrapolated
  CHECK_THROWS_AS(GrowthFunction::table({{1, 2}, {2, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(GrowthFunction::table({{2, 1}, {1, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(GrowthFunction::table({}), std::invalid_argument);
  CHECK_THROWS_AS(GrowthFunction::power(-1, 2), std::invalid_argument);
  CHECK_THROWS_AS(GrowthFunction::power_log(1, 0.5, -1), std::invalid_argument);
}

TEST_CASE("growth: osgood integrals") {
  CHECK(osgood_integral(GrowthFunction::power(1, 2), std::exp(10.0)) == doctest::Approx(10.0).epsilon(1e-8));
  CHECK(osgood_integral(GrowthFunction::power(1, 3), INFINITY) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(osgood_integral(GrowthFunction::constant(1), 3.0) == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(curvature_integral(CurvatureFunction(family::Power{1, 2}), INFINITY) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_THROWS(osgood_integral(GrowthFunction::power(1, 2), INFINITY));
  CHECK_THROWS(osgood_integral(GrowthFunction::power(1, 2), 0.5));
}

TEST_CASE("growth: classification table") {
  CHECK(classify_osgood(GrowthFunction::power(3, 2)).verdict == Verdict::divergent);
  CHECK(classify_osgood(GrowthFunction::power_log(1, 2, 2)).verdict == Verdict::convergent);
  CHECK(classify_osgood(GrowthFunction::power_log(1, 2, 1)).verdict == Verdict::divergent);
  CHECK(classify_osgood(GrowthFunction::power(1, 2.5)).verdict == Verdict::convergent);
  CHECK(classify_osgood(GrowthFunction::constant(1)).verdict == Verdict::divergent);
  const CurvatureFunction rlogr(family::PowerLog{1, 1, 1});
  CHECK(classify_osgood(GrowthFunction::from_curvature(1, rlogr)).verdict == Verdict::divergent);
  CHECK(classify_curvature(rlogr).verdict == Verdict::divergent);
  CHECK(classify_curvature(CurvatureFunction(family::Power{1, 1})).verdict == Verdict::divergent);
  CHECK(classify_curvature(CurvatureFunction(family::Power{1, 1.5})).verdict == Verdict::convergent);
  const auto v = classify_osgood(GrowthFunction::power(1, 2));
  CHECK(v.method == OsgoodMethod::analytic);
  CHECK(v.partial_integral == doctest::Approx(20 * std::numbers::ln2).epsilon(1e-8));
}

TEST_CASE("growth property: power classification matches beta <= 2 on a grid") {
  for (double C : {0.1, 1.0, 7.0}) {
    for (double beta = 0.0; beta <= 4.0 + 1e-12; beta += 0.25) {
      const auto L = GrowthFunction::power(C, beta);
      const Verdict expect = beta <= 2 ? Verdict::divergent : Verdict::convergent;
      CHECK(classify_osgood(L).verdict == expect);
      CHECK_MESSAGE(classify_osgood_numeric(L).verdict == expect, "C=" << C << " beta=" << beta);
      const CurvatureFunction k(family::Power{C, beta});
      const Verdict expect_k = beta <= 1 ? Verdict::divergent : Verdict::convergent;
      CHECK(classify_curvature(k).verdict == expect_k);
      CHECK_MESSAGE(classify_curvature_numeric(k).verdict == expect_k, "C=" << C << " beta=" << beta);
    }
  }
}

TEST_CASE("growth property: numeric agrees with analytic on closed-form families") {
  const std::vector<GrowthFunction> cases = {
      GrowthFunction::power_log(1, 2, 1),   GrowthFunction::power_log(1, 2, 2), GrowthFunction::power_log(2, 1.5, 3),
      GrowthFunction::power_log(1, 3, -1),  GrowthFunction::constant(0.5),
      GrowthFunction::from_curvature(1, CurvatureFunction(family::PowerLog{1, 1, 1})),
      GrowthFunction::from_curvature(2, CurvatureFunction(family::Power{1, 1.5})),
  };
  for (const auto& L : cases) {
    CHECK_MESSAGE(classify_osgood_numeric(L).verdict == classify_osgood(L).verdict, L.describe());
  }
}

TEST_CASE("growth: tables classify numerically") {
  const auto lin = GrowthFunction::table({{0, 1}, {1, 2}});
  const auto v = classify_osgood(lin);
  CHECK(v.method == OsgoodMethod::numeric_doubling);
  CHECK(v.verdict == Verdict::divergent);
}

TEST_CASE("growth property: eval is nondecreasing") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> lr(-6.0, 8.0);
  const std::vector<GrowthFunction> fams = {
      GrowthFunction::power(2, 0.5),      GrowthFunction::power_log(1, 2, -1.5),
      GrowthFunction::power_log(1, 0, 2), GrowthFunction::constant(3),
      GrowthFunction::table({{0.5, 1}, {1, 1}, {3, 10}}),
      GrowthFunction::from_curvature(1, CurvatureFunction(family::PowerLog{1, 1, 1})),
  };
  for (const auto& L : fams) {
    for (int k = 0; k < 10000; ++k) {
      double a = std::exp(lr(rng)), b = std::exp(lr(rng));
      if (a > b) std::swap(a, b);
      REQUIRE(L.eval(a) <= L.eval(b));
    }
  }
}

TEST_CASE("growth: theorem 2 envelopes") {
  const CurvatureFunction k(family::Power{1, 1});
  const auto e = thm2_envelopes(k, {1, 1, 1, 1, 1});
  CHECK(e.pointwise(2.0, 0.5).log_abs() == doctest::Approx(8.0 + std::log(2.0)));
  CHECK(e.pointwise(0.0, 1.0).log_abs() == doctest::Approx(0.0));
  CHECK(e.volume(0.0).log_abs() == doctest::Approx(0.0));
  CHECK(e.L.eval(2.0) == doctest::Approx(8.0));
}
