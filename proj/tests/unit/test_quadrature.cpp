#include <doctest.h>

#include <cmath>
#include <numbers>

#include "heatlab/quadrature.hpp"

using namespace heatlab;

TEST_CASE("quadrature: gk21 tables") {
  const auto& r = detail::gk21();
  double sk = r.wk[0], sg = r.wg[0];
  for (int i = 1; i < 11; ++i) {
    sk += 2 * r.wk[i];
    sg += 2 * r.wg[i];
  }
  CHECK(sk == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(sg == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(r.wg[0] == 0.0);  // 10-point Gauss rule has no node at 0
}

TEST_CASE("quadrature: polynomial and Gaussian integrals") {
  auto r = integrate_log([](double x) { return 3.0 * std::log(x); }, {0.0, 2.0});
  CHECK(std::exp(r.ln_value) == doctest::Approx(4.0).epsilon(1e-13));

  auto g = integrate_log([](double x) { return -x * x; }, {-40.0, 0.0, 40.0}, {1e-12});
  CHECK(g.ln_value == doctest::Approx(0.5 * std::log(std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("quadrature: astronomically scaled integrand") {
  // exp(5000 - x) on [0, 1]: e^{5000} (1 - e^{-1})
  auto r = integrate_log([](double x) { return 5000.0 - x; }, {0.0, 1.0});
  CHECK(r.ln_value == doctest::Approx(5000.0 + std::log(1.0 - std::exp(-1.0))).epsilon(1e-14));
  auto s = integrate_log([](double x) { return -8000.0 - x; }, {0.0, 1.0});
  CHECK(s.ln_value == doctest::Approx(-8000.0 + std::log(1.0 - std::exp(-1.0))).epsilon(1e-14));
}

TEST_CASE("quadrature: endpoint singularity and zero integrand") {
  // x^{-1/2} on [0, 1] = 2
  auto r = integrate_log([](double x) { return -0.5 * std::log(x); }, {0.0, 1.0}, {1e-9, 10000, true});
  CHECK(std::exp(r.ln_value) == doctest::Approx(2.0).epsilon(1e-8));
  auto z = integrate_log([](double) { return -std::numeric_limits<double>::infinity(); }, {0.0, 1.0});
  CHECK(z.ln_value == -std::numeric_limits<double>::infinity());
}

TEST_CASE("quadrature: failure modes") {
  CHECK_THROWS_AS(integrate_log([](double) { return std::nan(""); }, {0.0, 1.0}), QuadratureError);
  QuadOptions opt{1e-15, 2, true};
  CHECK_THROWS_AS(integrate_log([](double x) { return -0.9 * std::log(x); }, {0.0, 1.0}, opt), QuadratureError);
  opt.throw_on_failure = false;
  auto r = integrate_log([](double x) { return -0.9 * std::log(x); }, {0.0, 1.0}, opt);
  CHECK_FALSE(r.converged);
}

TEST_CASE("quadrature: breakpoint helpers") {
  auto b = clean_breakpoints({3.0, -1.0, 0.5, 0.5, 2.0}, 0.0, 2.0);
  REQUIRE(b.size() == 3);
  CHECK(b[0] == 0.0);
  CHECK(b[1] == 0.5);
  CHECK(b[2] == 2.0);
  std::vector<double> pts;
  add_graded_points(pts, 1.0, 0.25, 0.0, 2.0);
  auto c = clean_breakpoints(pts, 0.0, 2.0);
  CHECK(c.size() == 7);  // 0, .5, .75, 1, 1.25, 1.5, 2
}
