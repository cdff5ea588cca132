#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "heatlab/estimator.hpp"
#include "heatlab/schedule.hpp"

using namespace heatlab;
using boost::math::quadrature::gauss_kronrod;

namespace {

double gaussian_evolved(int n, double A, double sigma, double r, double t) {
  const double v = sigma * sigma + 2 * t;
  return A * std::pow(sigma * sigma / v, 0.5 * n) * std::exp(-r * r / (2 * v));
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

// Integral over B(c e_1, R) in R^n (n = 2, 3) of an axisymmetric f(axial, radial),
// in cylindrical coordinates.
template <class F>
double ball_cubature(int n, double c, double R, F f, double tol = 1e-10) {
  auto slice = [&](double z) {
    const double h = std::sqrt(std::max(0.0, R * R - (z - c) * (z - c)));
    if (h == 0) return 0.0;
    auto g = [&](double y) { return (n == 3 ? 2 * std::numbers::pi * y : 2.0) * f(z, y); };
    return gauss_kronrod<double, 31>::integrate(g, 0.0, h, 10, tol);
  };
  return gauss_kronrod<double, 31>::integrate(slice, c - R, c + R, 10, tol);
}

SolutionHandle two_spikes(double h1, double h2) {
  InitialData d{3, base::Zero{}, {}};
  d.spikes.push_back({0.6, 0.2, 0.3, LogScalar::from_real(h1)});
  d.spikes.push_back({1.6, 0.15, 0.3, LogScalar::from_real(h2)});
  return SolutionHandle(d);
}

}  // namespace

TEST_CASE("estimator: zero and constant data") {
  SolutionHandle zero(InitialData{3, base::Zero{}, {}});
  CHECK(spatial_integral(zero, {0.0, 2.0}, 2.0, 0.1).value.is_zero());
  const auto z = spacetime_integral(zero, {0.0, 2.0}, 2.0, 0.0);
  CHECK(z.value.is_zero());
  CHECK(z.quadrature_error_estimate == 0.0);

  SolutionHandle c(InitialData{3, base::Constant{1.5}, {}});
  const double vol = 4.0 / 3.0 * std::numbers::pi * 8.0;
  CHECK(lp_spacetime_norm(c, 1.0, 2.0).value.to_real() == doctest::Approx(1.5 * vol));
  CHECK(weighted_spacetime_l2(c, 1.0, 2.0).value.to_real() == doctest::Approx(2.25 * vol / 2));
  const auto half = spacetime_integral(c, {0.0, 2.0}, 0.5, 0.0);
  CHECK(half.norm.to_real() == doctest::Approx(std::pow(std::sqrt(1.5) * vol, 2.0)));
}

TEST_CASE("estimator: argument checks") {
  SolutionHandle sol(InitialData{3, base::Gaussian{1.0, 1.0}, {}});
  CHECK_THROWS_AS(spatial_integral(sol, {0.0, 0.0}, 2.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(spatial_integral(sol, {0.0, 1.0}, -1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(spatial_integral(sol, {0.0, 1.0}, 2.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(spacetime_integral(sol, {0.0, 1.0}, 2.0, -1.0), std::invalid_argument);
  const std::vector<double> radii{2.0, 1.0};
  CHECK_THROWS_AS(class_membership(sol, 1.0, GrowthFunction::constant(1.0), radii), std::invalid_argument);
  CHECK_THROWS_AS(membership_ceiling(sol, 0.4), std::invalid_argument);
}

TEST_CASE("estimator: gaussian spatial integrals against cubature") {
  const double A = 1.3, sigma = 0.5, t = 0.07;
  for (int n : {2, 3}) {
    SolutionHandle sol(InitialData{n, base::Gaussian{A, sigma}, {}});
    for (double p : {2.0, 1.0, 0.5, 3.0}) {
      for (Region om : {Region{0.0, 1.1}, Region{0.8, 0.6}, Region{-2.0, 1.5}}) {
        auto f = [&](double z, double y) { return std::pow(gaussian_evolved(n, A, sigma, std::hypot(z, y), t), p); };
        const double ref = ball_cubature(n, om.center, om.radius, f);
        const auto got = spatial_integral(sol, om, p, t);
        CHECK_MESSAGE(rel(got.value.to_real(), ref) <= 1e-6,
                      "n=" << n << " p=" << p << " c=" << om.center << " R=" << om.radius);
        CHECK(got.rel_error >= 0.0);
      }
    }
  }
}

TEST_CASE("estimator: gaussian space-time integral against nested quadrature") {
  const double A = 0.8, sigma = 0.4, a = 0.5;
  const Region om{0.3, 1.2};
  SolutionHandle sol(InitialData{3, base::Gaussian{A, sigma}, {}});
  auto G = [&](double t) {
    if (t == 0) return 0.0;
    auto f = [&](double z, double y) { return std::pow(gaussian_evolved(3, A, sigma, std::hypot(z, y), t), 2); };
    return std::pow(t, a) * ball_cubature(3, om.center, om.radius, f, 1e-11);
  };
  const double ref = gauss_kronrod<double, 31>::integrate(G, 0.0, 1.0, 12, 1e-10);
  const auto rep = spacetime_integral(sol, om, 2.0, a);
  CHECK(rel(rep.value.to_real(), ref) <= 1e-6);
  CHECK(rep.quadrature_error_estimate < 1e-5);
  CHECK(rep.tail_bound.to_real() <= 1e-10 * rep.value.to_real());
  CHECK(rep.norm.to_real() == doctest::Approx(std::sqrt(ref)).epsilon(1e-6));
}

TEST_CASE("estimator: gaussian over a radius far beyond its width") {
  // int_{R^3} u^2 = A^2 sigma^6 pi^{3/2} v^{-3/2}, v = sigma^2 + 2t; then int_0^1 t (.) dt in closed form
  const double A = 1.2, sigma = 0.5, s2 = sigma * sigma;
  auto F = [&](double w) { return 0.25 * (2 * std::sqrt(w) + 2 * s2 / std::sqrt(w)); };
  const double ref = A * A * std::pow(s2, 3) * std::pow(std::numbers::pi, 1.5) * (F(s2 + 2) - F(s2));
  SolutionHandle sol(InitialData{3, base::Gaussian{A, sigma}, {}});
  const auto rep = weighted_spacetime_l2(sol, 1.0, 15.0);
  CHECK(rel(rep.value.to_real(), ref) <= 1e-6);
}

TEST_CASE("estimator: overlapping spikes of both signs against cubature") {
  const auto sol = two_spikes(1.0, -2.0);
  const Region om{1.0, 1.2};
  const double t = 0.05;
  for (double p : {2.0, 1.0, 0.7}) {
    auto f = [&](double z, double y) { return std::pow(std::fabs(sol.evolve_point({z, y}, t).to_real()), p); };
    const double ref = ball_cubature(3, om.center, om.radius, f, 1e-9);
    const auto got = spatial_integral(sol, om, p, t);
    CHECK_MESSAGE(rel(got.value.to_real(), ref) <= 1e-5, "p=" << p);
  }
}

TEST_CASE("estimator: isolated spikes at small times") {
  const auto sol = two_spikes(1.0, 3.0);
  const double t = 1e-4;
  const Region om{1.0, 2.0};
  for (double p : {2.0, 1.0, 0.5}) {
    // Each spike on its own, radially about its center, by Gauss-Kronrod.
    double ref = 0;
    for (std::size_t j = 0; j < 2; ++j) {
      auto g = [&](double rho) {
        const double u = sol.spike_contribution(j, {sol.data().spikes[j].center_distance + rho, 0.0}, t).to_real();
        return 4 * std::numbers::pi * rho * rho * std::pow(u, p);
      };
      const double rj = sol.data().spikes[j].inner_radius, Rj = sol.data().spikes[j].outer_radius;
      ref += gauss_kronrod<double, 31>::integrate(g, 0.0, rj, 10, 1e-12) +
             gauss_kronrod<double, 31>::integrate(g, rj, Rj, 10, 1e-12) +
             gauss_kronrod<double, 31>::integrate(g, Rj, Rj + 0.3, 10, 1e-12);
    }
    const auto got = spatial_integral(sol, om, p, t);
    CHECK_MESSAGE(rel(got.value.to_real(), ref) <= 1e-7, "p=" << p);
  }
}

TEST_CASE("estimator: homogeneity in the data") {
  const auto one = two_spikes(1.0, 0.5);
  const auto three = two_spikes(3.0, 1.5);
  const Region om{0.9, 1.4};
  for (double t : {0.01, 0.2}) {
    const auto a = spatial_integral(one, om, 2.0, t).value.log_abs();
    const auto b = spatial_integral(three, om, 2.0, t).value.log_abs();
    CHECK(b - a == doctest::Approx(2 * std::log(3.0)).epsilon(1e-7));
    const auto c = spatial_integral(one, om, 1.0, t).value.log_abs();
    const auto d = spatial_integral(three, om, 1.0, t).value.log_abs();
    CHECK(d - c == doctest::Approx(std::log(3.0)).epsilon(1e-7));
  }
}

TEST_CASE("estimator: monotone in the radius") {
  SolutionHandle sol(InitialData{3, base::BallIndicator{0.5, 2.0}, {SpikeSpec{1.5, 0.1, 0.2, LogScalar::from_real(5)}}});
  double prev = -std::numeric_limits<double>::infinity();
  for (double R : {0.5, 1.0, 1.5, 2.0, 3.0}) {
    const auto rep = weighted_spacetime_l2(sol, 1.0, R);
    CHECK(rep.value.log_abs() > prev);
    prev = rep.value.log_abs();
  }
}

TEST_CASE("estimator: class membership and the envelope ceiling") {
  InitialData d{3, base::Zero{}, {SpikeSpec{1.5, 0.2, 0.3, LogScalar::from_log(2.0)}}};
  SolutionHandle sol(d);
  const double a = 2.0;
  const double ceiling = membership_ceiling(sol, a);
  const double M = d.l1_norm()->to_real();
  CHECK(ceiling == doctest::Approx(std::log(M * M * std::pow(4 * std::numbers::pi, -1.5) / 1.5)));
  const std::vector<double> radii{1.0, 2.0, 3.0};
  const auto inside = class_membership(sol, a, GrowthFunction::constant(ceiling), radii);
  REQUIRE(inside.size() == 3);
  for (const auto& r : inside) {
    REQUIRE(r.comparison.has_value());
    CHECK(r.comparison->inside);
    CHECK(r.comparison->margin == doctest::Approx(ceiling - r.value.log_abs() - std::log1p(r.quadrature_error_estimate)));
  }
  const auto outside = class_membership(sol, a, GrowthFunction::constant(inside[0].value.log_abs() - 1), radii);
  for (const auto& r : outside) CHECK_FALSE(r.comparison->inside);
  CHECK_FALSE(weighted_spacetime_l2(sol, a, 1.0).comparison.has_value());
}

TEST_CASE("estimator: pointwise envelope check") {
  SolutionHandle sol(InitialData{3, base::Gaussian{2.0, 0.3}, {}});
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(-1, 1), ut(1e-3, 1);
  std::vector<EnvelopeSample> samples;
  for (int k = 0; k < 200; ++k) samples.push_back({{ux(rng), std::fabs(ux(rng))}, ut(rng)});
  auto env = [&](const AxisPoint&, double t) { return *linf_envelope(sol, t); };
  const auto ok = pointwise_envelope_check(sol, env, samples, 2);
  CHECK(ok.checked == 200);
  CHECK(ok.violations.empty());
  CHECK(ok.worst_margin <= 0.0);
  auto shrunk = [&](const AxisPoint&, double t) { return *linf_envelope(sol, t) * LogScalar::from_real(0.5); };
  const auto bad = pointwise_envelope_check(sol, shrunk, samples, 1);
  CHECK_FALSE(bad.violations.empty());
  for (const auto& v : bad.violations) CHECK(v.margin > 0);
}

TEST_CASE("estimator: threads do not change results") {
  SolutionHandle sol(InitialData{3, base::Gaussian{1.0, 0.5}, {SpikeSpec{1.0, 0.1, 0.2, LogScalar::from_real(-3)}}});
  EstimatorOptions one, four;
  four.threads = 4;
  const auto a = spacetime_integral(sol, {1.0, 1.0}, 2.0, 1.0, one);
  const auto b = spacetime_integral(sol, {1.0, 1.0}, 2.0, 1.0, four);
  CHECK(a.value.log_abs() == b.value.log_abs());
  CHECK(a.time_evaluations == b.time_evaluations);
}

TEST_CASE("estimator: small-time probe from the solver") {
  const auto times = halving_times(0.5, 10);
  SolutionHandle zero(InitialData{3, base::Zero{}, {}});
  CHECK(small_time_vanishing_probe(zero, 2.0, times).vanishing);
  SolutionHandle g(InitialData{3, base::Gaussian{1.0, 0.5}, {}});
  const auto rep = small_time_vanishing_probe(g, 2.0, times);
  CHECK_FALSE(rep.vanishing);
  REQUIRE(rep.samples.size() == times.size());
  // E(t) tends to a positive limit, so t^{-1} E(t) doubles as t halves.
  CHECK(rep.samples.back().value.log_abs() - rep.samples[8].value.log_abs() == doctest::Approx(std::log(2.0)).epsilon(0.03));
}
