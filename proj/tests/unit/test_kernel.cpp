#include <doctest.h>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "heatlab/kernel.hpp"

using namespace heatlab;

namespace {

double gaussian_evolved(int n, double A, double sigma, double r, double t) {
  const double v = sigma * sigma + 2 * t;
  return A * std::pow(sigma * sigma / v, 0.5 * n) * std::exp(-r * r / (2 * v));
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace

TEST_CASE("kernel: heat kernel values") {
  CHECK(heat_kernel(1, 0.0, 1.0 / (4 * std::numbers::pi)).log_abs() == doctest::Approx(0.0).scale(1));
  CHECK(heat_kernel(3, 4.0, 1.0).log_abs() == doctest::Approx(-1.5 * std::log(4 * std::numbers::pi) - 1.0));
  CHECK_THROWS_AS(heat_kernel(3, 1.0, 0.0), std::domain_error);
  // deep tails stay representable
  CHECK(heat_kernel(3, 1.0, 1e-6).log_abs() == doctest::Approx(-250000 - 1.5 * std::log(4e-6 * std::numbers::pi)));
}

TEST_CASE("kernel: kernel integrates to one") {
  for (int n = 1; n <= 3; ++n) {
    for (double t : {0.01, 0.1, 1.0}) {
      auto ln_f = [&](double s) { return (n - 1) * std::log(s) + heat_kernel(n, s * s, t).log_abs(); };
      const double hi = 60 * std::sqrt(t);
      const auto q = integrate_log(ln_f, {0.0, std::sqrt(t), 4 * std::sqrt(t), hi}, {1e-13});
      const double mass = std::exp(ln_unit_sphere_area(n) + q.ln_value);
      CHECK(std::fabs(mass - 1.0) <= 1e-8);
    }
  }
}

TEST_CASE("kernel: constant data is preserved") {
  SolutionHandle sol(InitialData{3, base::Constant{2.5}, {}});
  for (double t : {1e-4, 0.3, 1.0}) CHECK(sol.evolve_point({1.0, 2.0}, t).to_real() == doctest::Approx(2.5));
  CHECK_FALSE(linf_envelope(sol, 1.0).has_value());
}

TEST_CASE("kernel: gaussian data matches the closed-form evolution") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(-3, 3), ut(0.001, 1.0);
  for (int n : {1, 2, 3, 4}) {
    SolutionHandle sol(InitialData{n, base::Gaussian{1.7, 0.6}, {}});
    for (int k = 0; k < 12; ++k) {
      const AxisPoint x{ux(rng), n == 1 ? 0.0 : std::fabs(ux(rng))};
      const double t = ut(rng);
      const double ref = gaussian_evolved(n, 1.7, 0.6, x.norm(), t);
      CHECK_MESSAGE(rel(sol.evolve_point(x, t).to_real(), ref) <= 1e-6, "n=" << n << " t=" << t);
    }
  }
}

TEST_CASE("kernel: ball indicator at very small time recovers the height") {
  SolutionHandle sol(InitialData{3, base::BallIndicator{0.8, 3.0}, {}});
  CHECK(std::fabs(sol.evolve_point({0, 0}, 1e-6 * 0.64).to_real() - 3.0) <= 1e-3);
}

TEST_CASE("kernel: ball gaussian mass") {
  for (int n : {1, 2, 3, 5}) {
    for (double t : {0.01, 0.3, 2.0}) {
      const double rho = 0.7;
      const double ref = boost::math::gamma_p(0.5 * n, rho * rho / (4 * t));
      CHECK(rel(ball_gaussian_mass(n, 0.0, rho, t).to_real(), ref) < 1e-9);
      CHECK(rel(ball_gaussian_mass_radial(n, rho, t).to_real(), ref) < 1e-10);
    }
  }
  CHECK(rel(ball_gaussian_mass(1, 0.0, 0.5, 0.2).to_real(), std::erf(0.5 / (2 * std::sqrt(0.2)))) < 1e-10);
  CHECK(ball_gaussian_mass(3, 0.3, INFINITY, 0.5).to_real() == doctest::Approx(1.0).epsilon(1e-9));
  // far from the ball the mass is below the pointwise kernel bound
  for (double t : {0.01, 0.1}) {
    const double rho = 0.5, d = rho + 10 * std::sqrt(t) + 0.1;
    CHECK(ball_gaussian_mass(3, d, rho, t).log_abs() <= -(d - rho) * (d - rho) / (4 * t));
  }
}

TEST_CASE("kernel: shell rule and polar-angle quadrature agree") {
  KernelOptions two_d;
  two_d.angular = AngularRule::quadrature;
  for (double d : {0.0, 0.2, 1.0, 3.0}) {
    for (double t : {0.005, 0.1, 1.0}) {
      const auto a = ball_gaussian_mass(3, d, 0.6, t);
      const auto b = ball_gaussian_mass(3, d, 0.6, t, two_d);
      CHECK(std::fabs(a.log_abs() - b.log_abs()) < 1e-8);
    }
    const double radial = ball_gaussian_mass_radial(3, 0.6, 0.1).log_abs();
    if (d == 0.0) CHECK(std::fabs(ball_gaussian_mass(3, 0.0, 0.6, 0.1, two_d).log_abs() - radial) < 1e-8);
  }
}

TEST_CASE("kernel: spike contribution") {
  const double h_ln = 27.0;
  SpikeSpec s{2.5, 1e-3, 2e-3, LogScalar::from_log(h_ln)};
  CHECK(spike_contribution(3, SpikeSpec{2.5, 1e-3, 2e-3, LogScalar::zero()}, {2.5, 0}, 0.1).is_zero());
  // plateau-only limit at the center: h times the centered ball mass
  const SpikeSpec plateau{1.0, 0.3, 0.3 * (1 + 1e-12), LogScalar::from_log(h_ln)};
  const auto v = spike_contribution(3, plateau, {1.0, 0.0}, 0.05);
  const double ref = h_ln + std::log(boost::math::gamma_p(1.5, 0.09 / 0.2));
  CHECK(v.log_abs() == doctest::Approx(ref).epsilon(1e-9));
  // lower bound over the plateau: kernel at distance 2 r~ times plateau mass
  for (double t : {1e-4, 1e-2, 1.0}) {
    for (double off : {0.0, 0.5e-3, 0.99e-3}) {
      const auto c = spike_contribution(3, s, {2.5 + off, 0.0}, t);
      const double bound = -1.5 * std::log(4 * std::numbers::pi * t) - 4e-6 / (4 * t) + h_ln +
                           std::log(4 * std::numbers::pi / 3 * 1e-9);
      CHECK(c.log_abs() >= bound);
    }
  }
  // negative spikes give negative contributions
  SpikeSpec neg = s;
  neg.height = -s.height;
  CHECK(spike_contribution(3, neg, {2.5, 0.0}, 0.01).is_negative());
}

TEST_CASE("kernel: initial data bookkeeping") {
  InitialData d{3, base::Zero{}, {}};
  d.spikes.push_back({1.5, 0.1, 0.2, LogScalar::from_real(2.0)});
  d.spikes.push_back({2.5, 0.1, 0.2, LogScalar::from_real(3.0)});
  CHECK_NOTHROW(d.validate());
  CHECK(d.value({1.5, 0.0}).to_real() == 2.0);
  CHECK(d.value({1.5, 0.15}).to_real() == doctest::Approx(1.0));
  CHECK(d.value({0.0, 0.0}).is_zero());
  CHECK(d.sup_bound().to_real() == doctest::Approx(3.0));
  // l1 of the spike shape: plateau ball plus the linear shell
  auto shell = [](double a, double b) {
    return 4 * std::numbers::pi * ((b * std::pow(b, 3) / 3 - std::pow(b, 4) / 4) -
                                   (b * std::pow(a, 3) / 3 - std::pow(a, 4) / 4)) / (b - a);
  };
  const double one = 4 * std::numbers::pi / 3 * 1e-3 + shell(0.1, 0.2);
  CHECK(d.l1_norm()->to_real() == doctest::Approx(5 * one).epsilon(1e-12));

  d.spikes.push_back({2.6, 0.01, 0.02, LogScalar::one()});
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  CHECK_THROWS_AS((InitialData{3, base::Gaussian{1, -1}, {}}.validate()), std::invalid_argument);

  InitialData g{2, base::Gaussian{2.0, 0.5}, {}};
  CHECK(g.l1_norm()->to_real() == doctest::Approx(2.0 * 2 * std::numbers::pi * 0.25));
  InitialData tab{3, base::RadialTable{{{1.0, 2.0}, {2.0, 0.0}}}, {}};
  // 2 on B(0,1), linear to 0 on [1,2]: 4 pi (2/3 + int_1^2 2(2-s)s^2 ds)
  CHECK(tab.l1_norm()->to_real() == doctest::Approx(4 * std::numbers::pi * (2.0 / 3 + 11.0 / 6)).epsilon(1e-12));
}

TEST_CASE("kernel property: nonnegative, below the envelope and the maximum principle") {
  InitialData d{3, base::BallIndicator{0.5, 1.0}, {}};
  d.spikes.push_back({1.5, 0.05, 0.1, LogScalar::from_log(8.0)});
  d.spikes.push_back({2.5, 0.01, 0.02, LogScalar::from_log(20.0)});
  SolutionHandle sol(d);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ua(-0.5, 3.5), ur(0, 1), lt(std::log(1e-4), 0.0);
  const auto sup = d.sup_bound();
  for (int k = 0; k < 200; ++k) {
    const AxisPoint x{ua(rng), ur(rng)};
    const double t = std::exp(lt(rng));
    const auto u = sol.evolve_point(x, t);
    CHECK_FALSE(u.is_negative());
    CHECK(u <= *linf_envelope(sol, t));
    CHECK(u <= sup);
  }
}

TEST_CASE("kernel: radial finite volumes") {
  SUBCASE("zero data stays zero") {
    const auto s = radial_fdm_solve([](double) { return 0.0; }, {3, 2.0, 0.01, 0.0, {}}, 0.1);
    CHECK(*std::max_element(s.u.begin(), s.u.end()) == 0.0);
  }
  SUBCASE("gaussian against the closed form") {
    const double sigma = 0.5;
    auto g = [&](double r) { return std::exp(-r * r / (2 * sigma * sigma)); };
    const auto s = radial_fdm_solve(g, {3, 4.0, 1e-3, 0.0, {}}, 0.1);
    double worst = 0;
    for (double r = 0; r <= 2.0; r += 0.01) worst = std::max(worst, rel(s.at(r), gaussian_evolved(3, 1, sigma, r, 0.1)));
    CHECK(worst <= 1e-3);
    const double m0 = std::pow(2 * std::numbers::pi * sigma * sigma, 1.5);
    CHECK(std::fabs(s.mass + s.boundary_outflow - m0) <= 1e-6 * m0);
  }
  SUBCASE("stability precondition and boundary contact") {
    CHECK_THROWS_AS(radial_fdm_solve([](double) { return 1.0; }, {3, 1.0, 0.01, 0.01 * 0.01 / 4, {}}, 0.1),
                    std::invalid_argument);
    CHECK_THROWS_AS(radial_fdm_solve([](double r) { return r < 0.9 ? 1.0 : 0.0; }, {3, 1.0, 0.01, 0.0, {0.9}}, 0.1),
                    std::runtime_error);
  }
}
