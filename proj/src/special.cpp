#include "heatlab/special.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "heatlab/quadrature.hpp"

namespace heatlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEuler = 0.57721566490153286061;

// ln Gamma(a, x) by modified Lentz continued fraction; any real a, x >= 1.
double upper_gamma_cf(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) return -x + a * std::log(x) + std::log(h);
  }
  throw std::runtime_error("ln_upper_gamma: continued fraction did not converge");
}

// ln of the lower incomplete gamma gamma(a, x), a > 0, by its power series.
double lower_gamma_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int n = 0; n < 100000; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-17) break;
  }
  return -x + a * std::log(x) + std::log(sum);
}

// E1(x) for 0 < x < 1 by its convergent series.
double exp_integral_e1(double x) {
  double sum = 0.0;
  double term = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= -x / k;
    const double add = -term / k;  // -(-x)^k / (k k!)
    sum += add;
    if (std::fabs(add) < 1e-18 * std::fabs(sum)) break;
  }
  return -kEuler - std::log(x) + sum;
}

}  // namespace

double ln_unit_ball_volume(int n) {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  return 0.5 * n * std::log(std::numbers::pi) - std::lgamma(0.5 * n + 1.0);
}

double ln_unit_sphere_area(int n) {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  return std::log(static_cast<double>(n)) + ln_unit_ball_volume(n);
}

double log1mexp(double x) {
  if (x > 0) throw std::domain_error("log1mexp: x must be <= 0");
  return x > -std::numbers::ln2 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

double log_expm1(double x) {
  if (!(x > 0)) throw std::domain_error("log_expm1: x must be > 0");
  return x > 30 ? x + std::log1p(-std::exp(-x)) : std::log(std::expm1(x));
}

double ln_upper_gamma(double a, double x) {
  if (std::isnan(a) || std::isnan(x)) throw std::domain_error("ln_upper_gamma: NaN");
  if (x < 0) throw std::domain_error("ln_upper_gamma: x must be >= 0");
  if (x == 0) {
    if (a <= 0) throw std::domain_error("ln_upper_gamma: Gamma(a, 0) diverges for a <= 0");
    return std::lgamma(a);
  }
  if (x == kInf) return -kInf;
  if (x >= 1.0 && x >= a + 1.0) return upper_gamma_cf(a, x);
  if (a > 0) {
    const double ln_gamma = std::lgamma(a);
    const double ln_p = lower_gamma_series(a, x) - ln_gamma;
    return ln_gamma + log1mexp(ln_p);
  }
  // a <= 0 and 0 < x < 1: recur downward from a + k with k = ceil(-a) (or from E1).
  const double k = std::ceil(-a);
  const double base = a + k;  // in [0, 1)
  double g;                   // Gamma(base, x), linear domain; x < 1 keeps it moderate
  if (base == 0.0) {
    g = exp_integral_e1(x);
  } else {
    g = std::exp(ln_upper_gamma(base, x));
  }
  for (double b = base; b > a + 0.5; b -= 1.0) {
    // Gamma(b-1, x) = (x^{b-1} e^{-x} - Gamma(b, x)) / (1 - b)
    g = (std::exp((b - 1.0) * std::log(x) - x) - g) / (1.0 - b);
  }
  if (!(g > 0)) throw std::runtime_error("ln_upper_gamma: loss of precision in recurrence");
  return std::log(g);
}

double ln_shell_angular_factor(int n, double z, AngularRule rule, double rel_tol) {
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!(z >= 0)) throw std::domain_error("ln_shell_angular_factor: z must be >= 0");
  if (n == 1) return std::log1p(std::exp(-2.0 * z));
  if (n == 3 && rule == AngularRule::closed_form) {
    const double two_pi = std::log(2.0 * std::numbers::pi);
    if (z < 1e-300) return two_pi + std::numbers::ln2;
    return two_pi + std::log(-std::expm1(-2.0 * z)) - std::log(z);
  }
  const double ln_sigma = ln_unit_sphere_area(n - 1);
  const double m = n - 2.0;
  auto ln_f = [&](double th) {
    const double h = std::sin(0.5 * th);
    const double s = std::sin(th);
    const double ln_sin = m == 0 ? 0.0 : (s > 0 ? m * std::log(s) : -kInf);
    return -2.0 * z * h * h + ln_sin;
  };
  std::vector<double> pts;
  if (z > 1.0) {
    for (double th = 1.0 / std::sqrt(z); th < std::numbers::pi; th *= 2.0) pts.push_back(th);
  }
  const auto bp = clean_breakpoints(std::move(pts), 0.0, std::numbers::pi);
  QuadOptions opt;
  opt.rel_tol = rel_tol;
  return ln_sigma + integrate_log(ln_f, bp, opt).ln_value;
}

double ln_sphere_band_measure(int n, double u_lo, double u_hi) {
  if (!(0 <= u_lo && u_lo <= u_hi && u_hi <= 2)) {
    throw std::domain_error("ln_sphere_band_measure: need 0 <= u_lo <= u_hi <= 2");
  }
  if (n == 1) {
    int count = 0;
    if (u_lo <= 0.0) ++count;
    if (u_hi >= 2.0) ++count;
    return count == 0 ? -kInf : std::log(static_cast<double>(count));
  }
  if (u_hi == u_lo) return -kInf;
  if (n == 3) return std::log(2.0 * std::numbers::pi * (u_hi - u_lo));
  auto theta = [](double u) { return 2.0 * std::asin(std::sqrt(0.5 * u)); };
  if (n == 2) return std::log(2.0 * (theta(u_hi) - theta(u_lo)));
  // Cap about the pole nearer the band, expressed with regularized incomplete beta.
  const double half_area = std::exp(ln_unit_sphere_area(n)) * 0.5;
  const double alpha = 0.5 * (n - 1);
  auto cap = [&](double u) {  // measure of {1 - w1 <= u}, u <= 1
    if (u <= 0) return 0.0;
    const double s2 = std::min(1.0, u * (2.0 - u));
    return half_area * boost::math::ibeta(alpha, 0.5, s2);
  };
  double measure;
  if (u_hi <= 1.0) {
    measure = cap(u_hi) - cap(u_lo);
  } else if (u_lo >= 1.0) {
    measure = cap(2.0 - u_lo) - cap(2.0 - u_hi);
  } else {
    measure = (half_area - cap(u_lo)) + (half_area - cap(2.0 - u_hi));
  }
  return measure > 0 ? std::log(measure) : -kInf;
}

}  // namespace heatlab
