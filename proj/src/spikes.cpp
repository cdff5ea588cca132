#include "heatlab/spikes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "heatlab/special.hpp"

namespace heatlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_index(int n, int i) {
  if (n < 3) throw std::invalid_argument("the construction needs n >= 3");
  if (i < 1) throw std::invalid_argument("spike index must be >= 1");
}

double cube(int i) { return static_cast<double>(i) * i * i; }

// Lower estimate of a computed value from its error estimate.
double ln_lower(const IntegralReport& r) {
  if (!r.value.is_positive()) return -kInf;
  const double e = std::min(r.quadrature_error_estimate, 1.0);
  return e >= 1.0 ? -kInf : r.value.log_abs() + std::log1p(-e);
}

std::vector<EnvelopeSample> envelope_samples(const InitialData& d, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double R = d.spikes.empty() ? 1.0 : d.spikes.back().center_distance + 1.0;
  std::vector<EnvelopeSample> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    EnvelopeSample s;
    if (!d.spikes.empty() && k % 2 == 0) {
      // near a spike, at times down to well below its squared radius
      const auto& sp = d.spikes[static_cast<std::size_t>(unit(rng) * d.spikes.size()) % d.spikes.size()];
      const double rho = 3 * sp.outer_radius * unit(rng);
      const double phi = std::numbers::pi * unit(rng);
      s.x = {sp.center_distance + rho * std::cos(phi), rho * std::sin(phi)};
      s.t = std::exp(std::log(1e-8) * unit(rng));
    } else {
      double z, y;
      do {
        z = R * (2 * unit(rng) - 1);
        y = R * unit(rng);
      } while (z * z + y * y > R * R);
      s.x = {z, y};
      s.t = std::exp(std::log(1e-4) * unit(rng));
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace

void Section3Config::validate() const {
  if (n < 3) throw std::invalid_argument("the construction needs n >= 3");
  if (i_max < 0) throw std::invalid_argument("i_max must be >= 0");
  if (!(height_factor >= 0) || !std::isfinite(height_factor)) {
    throw std::invalid_argument("height factor must be finite and >= 0");
  }
}

SpikeRadii spike_radii(int n, int i) {
  require_index(n, i);
  SpikeRadii r;
  r.ln_r = -(ln_unit_ball_volume(n) + 2 * std::log(i) + cube(i)) / n;
  r.ln_rtilde = r.ln_r - std::numbers::ln2 / n;
  return r;
}

InitialData build_example(const Section3Config& cfg) {
  cfg.validate();
  InitialData d{cfg.n, cfg.base, {}};
  const LogScalar factor = LogScalar::from_real(cfg.height_factor);
  for (int i = 1; i <= cfg.i_max; ++i) {
    const auto r = spike_radii(cfg.n, i);
    const double p = i + 0.5;
    const double outer = std::exp(r.ln_r);
    if (!(std::exp(r.ln_rtilde) > std::numeric_limits<double>::min())) {
      throw std::invalid_argument("spike " + std::to_string(i) + " is narrower than double precision resolves");
    }
    if (!(p - outer > i && p + outer < i + 1)) {
      throw std::logic_error("spike " + std::to_string(i) + " leaves its annulus");
    }
    d.spikes.push_back({p, std::exp(r.ln_rtilde), outer, factor * LogScalar::from_log(cube(i))});
  }
  d.validate();
  return d;
}

LogScalar pointwise_lower_bound(int n, int i, double t) {
  require_index(n, i);
  if (!(t > 0)) throw std::domain_error("pointwise_lower_bound: t must be > 0");
  const double rt = std::exp(spike_radii(n, i).ln_rtilde);
  return LogScalar::from_log(-std::numbers::ln2 - 2 * std::log(i) - 0.5 * n * std::log(4 * std::numbers::pi * t) -
                             rt * rt / t);
}

double ln_section3_constant(int n) {
  if (n < 3) throw std::invalid_argument("the construction needs n >= 3");
  return (2.0 * n - 2) / n * ln_unit_ball_volume(n) - 2.0 / n * std::numbers::ln2 -
         n * std::log(8 * std::numbers::pi) + ln_upper_gamma(n - 1.0, 1.0);
}

IntegralLowerBound integral_lower_bound(int n, int i) {
  require_index(n, i);
  IntegralLowerBound b;
  b.n = n;
  b.i = i;
  const double ln_rt = spike_radii(n, i).ln_rtilde;
  const double rt2 = std::exp(2 * ln_rt);
  // omega_n rt^n / (4 i^4) * 2 rt^2 (8 pi rt^2)^{-n} * Gamma(n - 1, .)
  const double ln_pref =
      ln_unit_ball_volume(n) - std::numbers::ln2 - 4 * std::log(i) - n * std::log(8 * std::numbers::pi) + (2 - n) * ln_rt;
  b.exact = LogScalar::from_log(ln_pref + ln_upper_gamma(n - 1.0, 2 * rt2));
  b.floor = LogScalar::from_log(ln_pref + ln_upper_gamma(n - 1.0, 1.0));
  b.ln_C = ln_section3_constant(n);
  b.q = (2.0 * n + 4) / n;
  b.target_exponent = (n - 2.0) / n * cube(i);
  b.asymptotic = LogScalar::from_log(b.ln_C - b.q * std::log(i) + b.target_exponent);
  return b;
}

ExampleReport verify_example(const Section3Config& cfg, const ExampleOptions& opt) {
  cfg.validate();
  ExampleReport rep;
  rep.config = cfg;
  rep.a = opt.a;
  const int n = cfg.n;
  const InitialData data = build_example(cfg);
  const SolutionHandle sol(data);
  const double ln_f2 = cfg.height_factor > 0 ? 2 * std::log(cfg.height_factor) : -kInf;
  const bool has_spikes = cfg.i_max > 0 && cfg.height_factor > 0;

  // (1) computed integrals against the closed-form chain
  rep.lower_bounds_ok = true;
  for (int i = 1; i <= cfg.i_max; ++i) {
    SpikeCheck c;
    c.i = i;
    c.center = i + 0.5;
    c.radii = spike_radii(n, i);
    c.bound = integral_lower_bound(n, i);
    c.bound.exact = c.bound.exact * LogScalar::from_log(ln_f2);
    c.bound.floor = c.bound.floor * LogScalar::from_log(ln_f2);
    c.bound.asymptotic = c.bound.asymptotic * LogScalar::from_log(ln_f2);
    c.patch = spacetime_integral(sol, Region{c.center, std::exp(c.radii.ln_rtilde)}, 2.0, 0.0, opt.estimator);
    c.ball = spacetime_integral(sol, Region{0.0, i + 1.0}, 2.0, 0.0, opt.estimator);
    const double ln_b = c.bound.exact.is_zero() ? -kInf : c.bound.exact.log_abs();
    c.patch_ok = ln_b == -kInf || ln_lower(c.patch) >= ln_b;
    c.ball_ok = ln_b == -kInf || ln_lower(c.ball) >= ln_b;
    rep.lower_bounds_ok = rep.lower_bounds_ok && c.patch_ok && c.ball_ok;
    rep.spikes.push_back(std::move(c));
  }

  // (2) the L1 envelope, pointwise
  if (const auto m = data.l1_norm()) {
    const auto samples = envelope_samples(data, opt.envelope_samples, opt.seed);
    auto env = [&](const AxisPoint&, double t) { return *linf_envelope(sol, t); };
    rep.envelope = pointwise_envelope_check(sol, env, samples, opt.estimator.threads);
    rep.envelope_ok = rep.envelope.violations.empty();
  } else {
    rep.notes.push_back("base is not integrable: no L1 envelope");
  }

  // (3) membership under the envelope ceiling
  if (!data.l1_norm()) {
    rep.ceiling = kInf;
    rep.notes.push_back("membership skipped: no L1 envelope");
  } else if (data.l1_norm()->is_zero()) {
    rep.ceiling = -kInf;
    rep.membership_ok = true;
    rep.notes.push_back("zero data: inside every class");
  } else {
    rep.ceiling = membership_ceiling(sol, opt.a);
    std::vector<double> radii;
    for (int i = 1; i <= std::max(cfg.i_max, 1); ++i) radii.push_back(i + 0.5);
    rep.membership = class_membership(sol, opt.a, GrowthFunction::constant(rep.ceiling), radii, opt.estimator);
    rep.membership_ok = std::all_of(rep.membership.begin(), rep.membership.end(),
                                    [](const IntegralReport& r) { return r.comparison && r.comparison->inside; });
  }

  // (4) quadratic classes: closed form for the untruncated construction,
  // computed values for the spikes present
  std::vector<double> ln_bound(opt.closed_form_i_max + 1, -kInf);
  for (int i = 1; i <= opt.closed_form_i_max; ++i) ln_bound[i] = integral_lower_bound(n, i).exact.log_abs() + ln_f2;
  rep.violation_ok = has_spikes && !opt.quadratic_grid.empty();
  for (double C : opt.quadratic_grid) {
    QuadraticCheck q;
    q.C = C;
    for (int i = opt.closed_form_i_max; i >= 1; --i) {
      if (!(ln_bound[i] > C * (i + 1.0) * (i + 1.0))) break;
      q.i_star = i;
    }
    for (const auto& s : rep.spikes) {
      if (s.ball.value.is_positive() && ln_lower(s.ball) > C * (s.i + 1.0) * (s.i + 1.0)) q.detected.push_back(s.i);
    }
    q.ok = has_spikes && q.i_star > 0;
    for (const auto& s : rep.spikes) {
      if (q.i_star > 0 && s.i >= q.i_star) q.ok = q.ok && std::find(q.detected.begin(), q.detected.end(), s.i) != q.detected.end();
    }
    rep.violation_ok = rep.violation_ok && q.ok;
    rep.quadratic.push_back(std::move(q));
  }
  if (!has_spikes) rep.notes.push_back("no spikes: the data is not a counterexample");
  if (has_spikes && cfg.i_max < opt.closed_form_i_max) {
    rep.notes.push_back("indices above i_max use the closed-form lower bound of the untruncated construction");
  }
  return rep;
}

}  // namespace heatlab
