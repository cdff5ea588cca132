#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "heatlab/quadrature.hpp"
#include "heatlab/special.hpp"

using namespace heatlab;

TEST_CASE("special: ball volumes and sphere areas") {
  CHECK(std::exp(ln_unit_ball_volume(1)) == doctest::Approx(2.0));
  CHECK(std::exp(ln_unit_ball_volume(2)) == doctest::Approx(std::numbers::pi));
  CHECK(std::exp(ln_unit_ball_volume(3)) == doctest::Approx(4.0 * std::numbers::pi / 3.0));
  CHECK(std::exp(ln_unit_sphere_area(1)) == doctest::Approx(2.0));
  CHECK(std::exp(ln_unit_sphere_area(2)) == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(std::exp(ln_unit_sphere_area(3)) == doctest::Approx(4.0 * std::numbers::pi));
}

TEST_CASE("special: log1mexp and log_expm1") {
  for (double x : {-1e-12, -1e-3, -0.5, -2.0, -40.0}) {
    CHECK(log1mexp(x) == doctest::Approx(std::log(-std::expm1(x))).epsilon(1e-14));
  }
  CHECK(log_expm1(1e-10) == doctest::Approx(std::log(1e-10)).epsilon(1e-9));
  CHECK(log_expm1(1000.0) == doctest::Approx(1000.0));
}

TEST_CASE("special: upper incomplete gamma against boost for a > 0") {
  for (double a : {0.1, 0.5, 1.0, 2.0, 3.5, 10.0, 40.0}) {
    for (double x : {1e-6, 0.01, 0.3, 1.0, 2.5, 9.0, 30.0, 200.0}) {
      const double ref = std::log(boost::math::tgamma(a, x));
      if (!std::isfinite(ref)) continue;
      CHECK_MESSAGE(ln_upper_gamma(a, x) == doctest::Approx(ref).epsilon(1e-12), "a=" << a << " x=" << x);
    }
  }
  CHECK(ln_upper_gamma(2.0, 0.0) == doctest::Approx(0.0).scale(1.0));
  // far tail that underflows in linear form
  CHECK(ln_upper_gamma(1.0, 2000.0) == doctest::Approx(-2000.0).epsilon(1e-15));
}

TEST_CASE("special: upper incomplete gamma for a <= 0 against quadrature") {
  for (double a : {0.0, -0.5, -1.0, -2.0, -2.7}) {
    for (double x : {0.05, 0.4, 0.9, 1.5, 6.0}) {
      auto ln_f = [a](double u) { return (a - 1.0) * std::log(u) - u; };
      auto q = integrate_log(ln_f, {x, x + 1, x + 5, x + 20, x + 80}, {1e-13});
      CHECK_MESSAGE(ln_upper_gamma(a, x) == doctest::Approx(q.ln_value).epsilon(1e-10), "a=" << a << " x=" << x);
    }
  }
  CHECK_THROWS_AS(ln_upper_gamma(0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(ln_upper_gamma(1.0, -1.0), std::domain_error);
}

TEST_CASE("special: shell angular factor") {
  // n = 2: int_0^{2 pi} e^{-z(1-cos)} = 2 pi e^{-z} I0(z)
  for (double z : {0.0, 0.1, 1.0, 10.0, 300.0}) {
    const double ref = std::log(2 * std::numbers::pi) - z + std::log(boost::math::cyl_bessel_i(0, z));
    if (std::isfinite(ref)) CHECK(ln_shell_angular_factor(2, z) == doctest::Approx(ref).epsilon(1e-11));
  }
  // n = 3 closed form vs quadrature
  for (double z : {0.0, 1e-8, 0.3, 5.0, 1e3, 1e7}) {
    CHECK(ln_shell_angular_factor(3, z) ==
          doctest::Approx(ln_shell_angular_factor(3, z, AngularRule::quadrature)).epsilon(1e-11));
  }
  // n = 1: two points
  CHECK(ln_shell_angular_factor(1, 0.0) == doctest::Approx(std::log(2.0)));
  // z = 0 gives the sphere area in every dimension
  for (int n = 2; n <= 6; ++n) {
    CHECK(ln_shell_angular_factor(n, 0.0) == doctest::Approx(ln_unit_sphere_area(n)).epsilon(1e-12));
  }
}

TEST_CASE("special: sphere band measure") {
  for (int n = 1; n <= 6; ++n) {
    CHECK(ln_sphere_band_measure(n, 0.0, 2.0) == doctest::Approx(ln_unit_sphere_area(n)).epsilon(1e-12));
    // bands are additive
    const double parts = std::exp(ln_sphere_band_measure(n, 0.0, 0.3)) +
                         std::exp(ln_sphere_band_measure(n, 0.3, 1.4)) +
                         std::exp(ln_sphere_band_measure(n, 1.4, 2.0));
    CHECK(parts == doctest::Approx(std::exp(ln_unit_sphere_area(n))).epsilon(1e-12));
  }
  CHECK(std::exp(ln_sphere_band_measure(3, 0.5, 0.7)) == doctest::Approx(2 * std::numbers::pi * 0.2));
  // n = 4: cap measure via quadrature of sin^2 over the polar angle times area(S^2)
  const double th = 2.0 * std::asin(std::sqrt(0.25));  // u = 0.5
  const double cap = 4 * std::numbers::pi * 0.5 * (th - std::sin(th) * std::cos(th));
  CHECK(std::exp(ln_sphere_band_measure(4, 0.0, 0.5)) == doctest::Approx(cap).epsilon(1e-12));
}
