#include "heatlab/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "heatlab/axisym.hpp"
#include "heatlab/parallel.hpp"
#include "heatlab/quadrature.hpp"
#include "heatlab/schedule.hpp"
#include "heatlab/special.hpp"

namespace heatlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Radial integrals of |u|^q stop this many sqrt(t / q) past the support.
constexpr double kWidths = 40.0;
// Deeper than this many sqrt(t) inside a plateau the solution equals the plateau.
constexpr double kFlat = 28.0;

// Graded targets about rho, limited to a window of 64 widths; the integrand is
// smooth on the scale of the window beyond it.
std::vector<double> near_targets(double rho, double width, double lo, double hi) {
  return graded_targets(rho, width, std::max(lo, rho - 64 * width), std::min(hi, rho + 64 * width));
}

double ln_region_volume(int n, const Region& om) { return ln_unit_ball_volume(n) + n * std::log(om.radius); }

// ln of the measure of { w in S^{n-1} : p + rho w in omega }, p the bump center.
double ln_band(int n, double delta, double R, double rho, double ln_full) {
  if (delta == 0) return rho <= R ? ln_full : -kInf;
  if (rho == 0) return delta < R ? ln_full : -kInf;
  const double u_max = (R - delta + rho) * (R + delta - rho) / (2 * delta * rho);
  if (u_max <= 0) return -kInf;
  if (u_max >= 2) return ln_full;
  return ln_sphere_band_measure(n, 0.0, u_max);
}

// Integral over omega of exp(h(ln|u_b|)), in polar coordinates about the bump
// center; h must map -inf to -inf. `q` sets how far past the support to go.
template <class H>
QuadResult band_integral(int n, const RadialBump& b, const Region& om, double t, double q, H&& h,
                         const KernelOptions& kopt, double rel_tol) {
  const double delta = std::fabs(b.center - om.center);
  const double R = om.radius;
  const double lo = std::max(0.0, delta - R);
  double hi = delta + R;
  const double sq = std::sqrt(t);
  const double edge = b.support_end();
  if (std::isfinite(edge)) hi = std::min(hi, edge + kWidths * sq / std::sqrt(std::min(q, 1.0)));
  QuadResult zero;
  if (!(hi > lo)) return zero;
  std::vector<double> pts{std::fabs(delta - R), delta + R};
  for (double k : b.kinks()) {
    for (double g : near_targets(k, sq, lo, hi)) pts.push_back(g);
  }
  if (b.shape == RadialBump::Shape::gaussian) {
    for (double g : graded_targets(0.0, std::sqrt(b.p1 * b.p1 + 2 * t), lo, hi)) pts.push_back(g);
  }
  const auto bp = clean_breakpoints(std::move(pts), lo, hi);
  const double ln_full = ln_unit_sphere_area(n);
  const double flat = b.flat_until() - kFlat * sq;
  const double ln_top = b.scale.log_abs();
  auto ln_f = [&](double rho) {
    const double band = ln_band(n, delta, R, rho, ln_full);
    if (band == -kInf) return -kInf;
    if (n > 1 && rho == 0) return -kInf;
    const double lu = rho < flat && b.shape == RadialBump::Shape::plateau_linear
                          ? ln_top
                          : bump_contribution(n, b, AxisPoint{b.center + rho, 0.0}, t, kopt).log_abs();
    const double v = h(lu);
    if (v == -kInf) return -kInf;
    return v + band + (n > 1 ? (n - 1) * std::log(rho) : 0.0);
  };
  QuadOptions qo;
  qo.rel_tol = rel_tol;
  qo.max_subdivisions = kopt.max_subdivisions;
  return integrate_log(ln_f, bp, qo);
}

// ln|u_b| at distance D from the bump center, tabulated over the distances
// that occur in omega; -inf beyond where the bump is negligible.
struct BumpCache {
  const RadialBump* bump = nullptr;
  double cut = kInf;
  std::optional<ChebyshevTable> table;

  double operator()(double D) const {
    if (!table || D > cut) return -kInf;
    return (*table)(std::clamp(D, table->lo(), table->hi()));
  }
};

BumpCache make_cache(int n, const RadialBump& b, const Region& om, double t, double q, const KernelOptions& kopt,
                     double abs_tol) {
  BumpCache c;
  c.bump = &b;
  const double delta = std::fabs(b.center - om.center);
  const double lo = std::max(0.0, delta - om.radius);
  double hi = delta + om.radius;
  const double sq = std::sqrt(t);
  const double edge = b.support_end();
  if (std::isfinite(edge)) {
    c.cut = edge + kWidths * sq / std::sqrt(std::min(q, 1.0));
    hi = std::min(hi, c.cut);
  }
  if (!(hi > lo)) {
    c.cut = -kInf;
    return c;
  }
  std::vector<double> pts;
  for (double k : b.kinks()) {
    for (double g : near_targets(k, sq, lo, hi)) pts.push_back(g);
  }
  auto f = [&](double D) { return bump_contribution(n, b, AxisPoint{b.center + D, 0.0}, t, kopt).log_abs(); };
  c.table.emplace(f, clean_breakpoints(std::move(pts), lo, hi), abs_tol);
  return c;
}

// Where each bump's solution changes quickly: its kinks blurred by sqrt(t),
// merged into one sphere when they are closer than that.
std::vector<FeatureSphere> features_of(const std::vector<const RadialBump*>& bumps, double t) {
  std::vector<FeatureSphere> out;
  const double sq = std::sqrt(t);
  for (const auto* b : bumps) {
    auto kinks = b->kinks();
    if (kinks.empty() || kinks.back() <= sq) {
      out.push_back({b->center, 0.0, std::max(sq, kinks.empty() ? b->p1 : kinks.back())});
      continue;
    }
    std::sort(kinks.begin(), kinks.end());
    double lo = kinks.front(), hi = kinks.front();
    for (std::size_t i = 1; i <= kinks.size(); ++i) {
      if (i < kinks.size() && kinks[i] - hi < sq) {
        hi = kinks[i];
        continue;
      }
      out.push_back({b->center, 0.5 * (lo + hi), sq + 0.5 * (hi - lo)});
      if (i < kinks.size()) lo = hi = kinks[i];
    }
  }
  return out;
}

// ln((kappa + e^l)^p - kappa^p)
double ln_excess_power(double l, double ln_kappa, double p) {
  if (l == -kInf) return -kInf;
  if (ln_kappa == -kInf) return p * l;
  const double x = l - ln_kappa;
  const double lp1 = x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
  return p * ln_kappa + log_expm1(p * lp1);
}

struct SpatialSum {
  LogScalar value;
  double ln_error = -kInf;

  void add(LogScalar v, double rel) {
    value += v;
    if (!v.is_zero() && rel > 0) ln_error = detail::log_add(ln_error, v.log_abs() + std::log(rel));
  }
  void add_error(double ln_e) { ln_error = detail::log_add(ln_error, ln_e); }
  SpatialIntegral result() const {
    SpatialIntegral r{value, 0.0};
    if (ln_error == -kInf) return r;
    r.rel_error = value.is_zero() ? kInf : std::exp(ln_error - value.log_abs());
    return r;
  }
};

SpatialIntegral merged_integral(const SolutionHandle& sol, const Region& om, double p, double t, double tol,
                                const std::vector<const RadialBump*>& bumps) {
  const int n = sol.dimension();
  const double kappa = sol.constant_part();
  std::vector<BumpCache> caches;
  for (const auto* b : bumps) caches.push_back(make_cache(n, *b, om, t, p, sol.options(), 0.05 * tol));
  const auto feats = features_of(bumps, t);
  const LogScalar k = LogScalar::from_real(kappa);
  auto ln_f = [&](double axial, double radial) {
    LogScalar u = k;
    for (const auto& c : caches) {
      const double l = c(std::hypot(axial - c.bump->center, radial));
      if (l != -kInf) u += LogScalar::from_log(l, c.bump->scale.sign());
    }
    return u.is_zero() ? -kInf : p * u.log_abs();
  };
  QuadOptions q;
  q.rel_tol = tol;
  q.max_subdivisions = sol.options().max_subdivisions;
  const auto r = integrate_axisym(n, ln_f, om.center, om.radius, feats, q);
  // The Chebyshev caches add a relative error of about p * 0.05 tol pointwise.
  return {r.value(), r.rel_error() + 0.05 * p * tol};
}

SpatialIntegral square_integral(const SolutionHandle& sol, const Region& om, double t, double tol,
                                const std::vector<const RadialBump*>& bumps) {
  const int n = sol.dimension();
  const double kappa = sol.constant_part();
  const auto& kopt = sol.options();
  const double ln_vol = ln_region_volume(n, om);
  SpatialSum sum;
  if (kappa > 0) sum.add(LogScalar::from_log(2 * std::log(kappa) + ln_vol), 0.0);
  std::vector<QuadResult> self;
  for (const auto* b : bumps) {
    const auto r = band_integral(n, *b, om, t, 2.0, [](double l) { return 2 * l; }, kopt, tol);
    self.push_back(r);
    sum.add(r.value(), r.rel_error());
    if (kappa > 0) {
      const auto r1 = band_integral(n, *b, om, t, 1.0, [](double l) { return l; }, kopt, tol);
      sum.add(LogScalar::from_log(std::log(2 * kappa) + r1.ln_value, b->scale.sign()), r1.rel_error());
    }
  }
  // Cross terms 2 s_j s_k int |u_j||u_k|, skipped when provably negligible.
  const double ln_two = std::log(2.0);
  const double ln_pref = -n * std::log(4 * std::numbers::pi * t);
  for (std::size_t j = 0; j < bumps.size(); ++j) {
    for (std::size_t k = j + 1; k < bumps.size(); ++k) {
      const double ln_cs = 0.5 * (self[j].ln_value + self[k].ln_value);
      double ln_bound = ln_cs;
      const double ej = bumps[j]->support_end(), ek = bumps[k]->support_end();
      const double gap = std::fabs(bumps[j]->center - bumps[k]->center) - ej - ek;
      if (std::isfinite(ej) && std::isfinite(ek) && gap > 0) {
        // Each point is at least gap/2 from one of the two supports.
        const double ln_gap = ln_vol + bump_l1_norm(n, *bumps[j]).log_abs() + bump_l1_norm(n, *bumps[k]).log_abs() +
                              ln_pref - gap * gap / (16 * t);
        ln_bound = std::min(ln_bound, ln_gap);
      }
      if (ln_bound == -kInf) continue;
      const double ln_total = sum.value.is_zero() ? -kInf : sum.value.log_abs();
      if (ln_two + ln_bound <= std::log(1e-3 * tol) + ln_total) {
        sum.add_error(ln_two + ln_bound);
        continue;
      }
      const double tol_jk = std::clamp(tol * std::exp(ln_total - ln_two - ln_bound), tol, 1e-2);
      std::vector<const RadialBump*> pair{bumps[j], bumps[k]};
      const auto cj = make_cache(n, *bumps[j], om, t, 2.0, kopt, 0.05 * tol_jk);
      const auto ck = make_cache(n, *bumps[k], om, t, 2.0, kopt, 0.05 * tol_jk);
      auto ln_f = [&](double axial, double radial) {
        const double a = cj(std::hypot(axial - bumps[j]->center, radial));
        if (a == -kInf) return -kInf;
        const double b = ck(std::hypot(axial - bumps[k]->center, radial));
        return b == -kInf ? -kInf : a + b;
      };
      QuadOptions q;
      q.rel_tol = tol_jk;
      q.max_subdivisions = kopt.max_subdivisions;
      const auto r = integrate_axisym(n, ln_f, om.center, om.radius, features_of(pair, t), q);
      const Sign s = bumps[j]->scale.sign() == bumps[k]->scale.sign() ? Sign::positive : Sign::negative;
      sum.add(LogScalar::from_log(ln_two + r.ln_value, s), r.rel_error() + 0.1 * tol_jk);
    }
  }
  return sum.result();
}

SpatialIntegral linear_integral(const SolutionHandle& sol, const Region& om, double t, double tol,
                                const std::vector<const RadialBump*>& bumps) {
  const int n = sol.dimension();
  SpatialSum sum;
  const double kappa = sol.constant_part();
  if (kappa > 0) sum.add(LogScalar::from_log(std::log(kappa) + ln_region_volume(n, om)), 0.0);
  for (const auto* b : bumps) {
    const auto r = band_integral(n, *b, om, t, 1.0, [](double l) { return l; }, sol.options(), tol);
    sum.add(r.value(), r.rel_error());
  }
  return sum.result();
}

// Spikes far apart relative to sqrt(t): int (kappa + sum u_j)^p is kappa^p |omega|
// plus one excess term per spike, up to an exponentially small interaction.
std::optional<SpatialIntegral> separated_integral(const SolutionHandle& sol, const Region& om, double p, double t,
                                                  double tol, const std::vector<const RadialBump*>& bumps) {
  const int n = sol.dimension();
  const double kw = 24.0 / std::sqrt(std::min(p, 1.0));
  const double reach = kw * std::sqrt(t);
  for (std::size_t j = 0; j < bumps.size(); ++j) {
    if (!bumps[j]->scale.is_positive() || !std::isfinite(bumps[j]->support_end())) return std::nullopt;
    for (std::size_t k = 0; k < j; ++k) {
      if (std::fabs(bumps[j]->center - bumps[k]->center) <
          bumps[j]->support_end() + bumps[k]->support_end() + 2 * reach) {
        return std::nullopt;
      }
    }
  }
  const double kappa = sol.constant_part();
  const double ln_kappa = kappa > 0 ? std::log(kappa) : -kInf;
  const double ln_vol = ln_region_volume(n, om);
  SpatialSum sum;
  if (kappa > 0) sum.add(LogScalar::from_log(p * ln_kappa + ln_vol), 0.0);
  LogScalar mass;
  for (const auto* b : bumps) {
    const auto r = band_integral(
        n, *b, om, t, p, [&](double l) { return ln_excess_power(l, ln_kappa, p); }, sol.options(), tol);
    sum.add(r.value(), r.rel_error());
    mass += bump_l1_norm(n, *b);
  }
  // Outside its own influence ball every spike is below eps; the interaction
  // is at most eps^p pointwise for p <= 1, p eps sup^{p-1} otherwise.
  const double ln_eps = mass.log_abs() - 0.5 * n * std::log(4 * std::numbers::pi * t) - kw * kw / 4;
  double ln_point = p * ln_eps;
  if (p > 1) ln_point = std::log(p) + ln_eps + (p - 1) * (sol.data().sup_bound().log_abs());
  sum.add_error(ln_vol + ln_point);
  return sum.result();
}

std::vector<const RadialBump*> live_bumps(const SolutionHandle& sol) {
  std::vector<const RadialBump*> out;
  for (const auto& b : sol.bumps()) {
    if (!b.scale.is_zero()) out.push_back(&b);
  }
  return out;
}

void check_region(const Region& om) {
  if (!(om.radius > 0 && std::isfinite(om.radius) && std::isfinite(om.center))) {
    throw std::invalid_argument("region radius must be positive and finite");
  }
}

}  // namespace

SpatialIntegral spatial_integral(const SolutionHandle& sol, const Region& omega, double p, double t,
                                 const EstimatorOptions& opt) {
  check_region(omega);
  if (!(p > 0 && std::isfinite(p))) throw std::invalid_argument("exponent p must be positive");
  if (!(t > 0)) throw std::domain_error("spatial_integral: t must be > 0");
  const int n = sol.dimension();
  const auto bumps = live_bumps(sol);
  const double kappa = sol.constant_part();
  const double tol = opt.rel_tol;
  if (bumps.empty()) {
    if (kappa == 0) return {};
    return {LogScalar::from_log(p * std::log(kappa) + ln_region_volume(n, omega)), 0.0};
  }
  if (p == 2.0) return square_integral(sol, omega, t, tol, bumps);
  const bool same_sign = std::all_of(bumps.begin(), bumps.end(), [&](const RadialBump* b) {
    return b->scale.sign() == bumps.front()->scale.sign() && (kappa == 0 || b->scale.is_positive());
  });
  if (p == 1.0 && same_sign) return linear_integral(sol, omega, t, tol, bumps);
  if (sol.base_bump_count() == 0) {
    if (auto r = separated_integral(sol, omega, p, t, tol, bumps)) return *r;
  }
  return merged_integral(sol, omega, p, t, tol, bumps);
}

IntegralReport spacetime_integral(const SolutionHandle& sol, const Region& omega, double p, double a,
                                  const EstimatorOptions& opt) {
  check_region(omega);
  if (!(p > 0 && std::isfinite(p))) throw std::invalid_argument("exponent p must be positive");
  if (!(a > -1 && std::isfinite(a))) throw std::invalid_argument("time weight a must exceed -1");
  if (!(opt.rel_tol > 0 && opt.tail_rel > 0)) throw std::invalid_argument("tolerances must be positive");
  const int n = sol.dimension();
  IntegralReport rep;
  rep.region = omega;
  rep.p = p;
  rep.a = a;
  const auto bumps = live_bumps(sol);
  const double kappa = sol.constant_part();
  if (bumps.empty()) {
    if (kappa > 0) {
      rep.value = LogScalar::from_log(p * std::log(kappa) + ln_region_volume(n, omega) - std::log(a + 1));
      rep.norm = rep.value.pow(1.0 / p);
    }
    return rep;
  }

  // sup_t int |u|^p, from |u| <= sup|u0| and ||u(t)||_1 <= ||u0||_1.
  const double ln_vol = ln_region_volume(n, omega);
  const double ln_sup = sol.data().sup_bound().log_abs();
  double ln_gmax = p * ln_sup + ln_vol;
  if (const auto m = sol.data().l1_norm(); m && !m->is_zero()) {
    const double ln_m = m->log_abs();
    ln_gmax = std::min(ln_gmax, p >= 1 ? (p - 1) * ln_sup + ln_m : (1 - p) * ln_vol + p * ln_m);
  }

  // Natural time scales: squared kink radii and bump distances.
  std::vector<double> scales;
  for (const auto* b : bumps) {
    for (double k : b->kinks()) {
      if (k > 0) scales.push_back(2 * std::log(k));
    }
    if (b->shape == RadialBump::Shape::gaussian) scales.push_back(2 * std::log(b->p1));
    const double d = std::fabs(std::fabs(b->center - omega.center) - omega.radius);
    if (d > 0) scales.push_back(2 * std::log(d));
  }

  const double spatial_tol = 0.05 * opt.rel_tol;
  EstimatorOptions inner = opt;
  inner.rel_tol = spatial_tol;
  double worst_spatial = 0.0;
  bool cancelled = false;
  auto batch = [&](std::span<const double> ss, std::span<double> out) {
    std::vector<SpatialIntegral> g(ss.size());
    parallel_for(ss.size(), opt.threads, [&](std::size_t i) { g[i] = spatial_integral(sol, omega, p, std::exp(ss[i]), inner); });
    for (std::size_t i = 0; i < ss.size(); ++i) {
      rep.time_evaluations++;
      cancelled = cancelled || g[i].value.cancelled();
      if (!g[i].value.is_positive()) {
        cancelled = cancelled || g[i].value.is_negative();
        out[i] = -kInf;
        continue;
      }
      worst_spatial = std::max(worst_spatial, g[i].rel_error);
      out[i] = (a + 1) * ss[i] + g[i].value.log_abs();
    }
  };

  QuadOptions q;
  q.rel_tol = 0.5 * opt.rel_tol;
  q.max_subdivisions = 2000;
  auto piece = [&](double lo, double hi) {
    std::vector<double> pts;
    if (hi == 0.0) pts = {-8.0, -16.0};
    const auto bp = clean_breakpoints(std::move(pts), lo, hi);
    return integrate_log_batched(batch, bp, q);
  };

  constexpr double kFirst = -20.0, kStep = -10.0, kLast = -600.0;
  double s0 = kFirst;
  auto r = piece(s0, 0.0);
  double ln_value = r.ln_value, ln_err = r.ln_error;
  auto ln_tail = [&](double s) { return ln_gmax + (a + 1) * s - std::log(a + 1); };
  while (s0 > kLast && (ln_value == -kInf || ln_tail(s0) > std::log(opt.tail_rel) + ln_value)) {
    const auto more = piece(s0 + kStep, s0);
    ln_value = detail::log_add(ln_value, more.ln_value);
    ln_err = detail::log_add(ln_err, more.ln_error);
    s0 += kStep;
  }
  rep.t_floor = std::exp(s0);
  rep.tail_bound = LogScalar::from_log(ln_tail(s0));
  rep.value = LogScalar::from_log(ln_value);
  rep.norm = rep.value.pow(1.0 / p);
  rep.cancelled = cancelled;
  if (ln_value == -kInf) {
    rep.quadrature_error_estimate = kInf;
  } else {
    rep.quadrature_error_estimate =
        (ln_err == -kInf ? 0.0 : std::exp(ln_err - ln_value)) + worst_spatial + std::exp(ln_tail(s0) - ln_value);
  }
  return rep;
}

IntegralReport weighted_spacetime_l2(const SolutionHandle& sol, double a, double radius, const EstimatorOptions& opt) {
  return spacetime_integral(sol, Region{0.0, radius}, 2.0, a, opt);
}

IntegralReport lp_spacetime_norm(const SolutionHandle& sol, double p, double radius, const EstimatorOptions& opt) {
  return spacetime_integral(sol, Region{0.0, radius}, p, 0.0, opt);
}

std::vector<IntegralReport> class_membership(const SolutionHandle& sol, double a, const GrowthFunction& L,
                                             std::span<const double> radii, const EstimatorOptions& opt) {
  std::vector<IntegralReport> out;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (i > 0 && !(radii[i] > radii[i - 1])) throw std::invalid_argument("radii must increase");
    auto rep = weighted_spacetime_l2(sol, a, radii[i], opt);
    Comparison c;
    c.L_value = L.eval(radii[i]);
    const double ln_upper = rep.value.is_zero() ? -kInf : rep.value.log_abs() + std::log1p(rep.quadrature_error_estimate);
    c.margin = c.L_value - ln_upper;
    c.inside = c.margin >= 0;
    rep.comparison = c;
    out.push_back(std::move(rep));
  }
  return out;
}

EnvelopeReport pointwise_envelope_check(const SolutionHandle& sol,
                                        const std::function<LogScalar(const AxisPoint&, double)>& envelope,
                                        std::span<const EnvelopeSample> samples, int threads) {
  std::vector<LogScalar> u(samples.size()), env(samples.size());
  parallel_for(samples.size(), threads, [&](std::size_t i) {
    u[i] = sol.evolve_point(samples[i].x, samples[i].t);
    env[i] = envelope(samples[i].x, samples[i].t);
  });
  EnvelopeReport rep;
  rep.checked = samples.size();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double lu = u[i].is_positive() ? u[i].log_abs() : -kInf;
    const double le = env[i].is_positive() ? env[i].log_abs() : (env[i].is_zero() ? -kInf : kInf);
    const double margin = lu == -kInf ? -kInf : lu - le;
    rep.worst_margin = std::max(rep.worst_margin, margin);
    if (margin > 0) rep.violations.push_back({samples[i], u[i], env[i], margin});
  }
  return rep;
}

double membership_ceiling(const SolutionHandle& sol, double a) {
  const int n = sol.dimension();
  if (!(a > 0.5 * n - 1)) throw std::invalid_argument("membership_ceiling: need a > n/2 - 1");
  const auto m = sol.data().l1_norm();
  if (!m) throw std::invalid_argument("membership_ceiling: data is not integrable");
  if (m->is_zero()) return -kInf;
  return 2 * m->log_abs() - 0.5 * n * std::log(4 * std::numbers::pi) - std::log(a - 0.5 * n + 1);
}

ProbeReport small_time_vanishing_probe(const SolutionHandle& sol, double R, std::span<const double> times) {
  const Region om{0.0, R};
  return small_time_vanishing_probe([&](double t) { return spatial_integral(sol, om, 2.0, t).value; }, times);
}

}  // namespace heatlab
