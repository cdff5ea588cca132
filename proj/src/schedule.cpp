#include "heatlab/schedule.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace heatlab {

double xi_weight(double r, double R, double T, double t) {
  if (!(t < T)) throw std::domain_error("xi_weight: need t < T");
  const double d = std::max(0.0, r - R);
  return -d * d / (4.0 * (T - t));
}

double xi_eikonal_residual(double R, double T, std::span<const std::pair<double, double>> grid, double h) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& [r, t] : grid) {
    if (!(t < T)) throw std::domain_error("xi_eikonal_residual: grid point with t >= T");
    if (r == R) throw std::domain_error("xi_eikonal_residual: grid point on the kink r = R");
    const double hh = std::min(h, 0.5 * (T - t));
    const double dt = (xi_weight(r, R, T, t + hh) - xi_weight(r, R, T, t - hh)) / (2.0 * hh);
    const double g = std::max(0.0, r - R) / (2.0 * (T - t));
    worst = std::max(worst, dt + g * g);
  }
  return grid.empty() ? 0.0 : worst;
}

double cutoff_constant(double m) {
  if (!(m > 0)) throw std::invalid_argument("cutoff_constant: m must be > 0");
  return std::pow(4.0, 2.0 * m - 1.0) * std::pow(m, m);
}

double ln_cutoff_constant(double m) {
  if (!(m > 0)) throw std::invalid_argument("cutoff_constant: m must be > 0");
  return (2.0 * m - 1.0) * std::log(4.0) + m * std::log(m);
}

LogScalar inductive_rhs(double R, double T, double m, double a) {
  if (!(m > a + 1)) throw std::invalid_argument("inductive_rhs: need m > a + 1");
  if (!(R > 0 && T > 0)) throw std::invalid_argument("inductive_rhs: need R, T > 0");
  return LogScalar::from_log(ln_cutoff_constant(m) + (m - a - 1.0) * std::log(T) - 2.0 * m * std::log(R));
}

namespace {

// R^2 / (16 L(2R)); exact in doubles while R_i is representable, logs beyond.
double step_size(const GrowthFunction& L, double R0, long i, double ln_R) {
  const double R = std::ldexp(R0, static_cast<int>(std::min<long>(i, 100000)));
  if (std::isfinite(R * R)) {
    const double l = L.eval(2.0 * R);
    if (std::isfinite(l) && l > 0) return R * R / (16.0 * l);
  }
  return std::exp(2.0 * ln_R - std::log(16.0) - L.ln_eval(ln_R + std::log(2.0)));
}

}  // namespace

double ScheduleRow::R() const { return std::exp(ln_R); }

ScheduleResult build_schedule(const ScheduleParams& p) {
  if (!(p.m > p.a + 1)) throw std::invalid_argument("build_schedule: need m > a + 1");
  if (!(p.a > 0)) throw std::invalid_argument("build_schedule: need a > 0");
  if (!(p.tau0 > 0 && p.tau0 <= 1)) throw std::invalid_argument("build_schedule: need 0 < tau0 <= 1");
  if (!(p.R0 > 0)) throw std::invalid_argument("build_schedule: need R0 > 0");
  if (p.max_steps < 1) throw std::invalid_argument("build_schedule: max_steps must be >= 1");
  p.L.require_positive("build_schedule");

  ScheduleResult res;
  const double ln_c = ln_cutoff_constant(p.m);
  const double ln_R0 = std::log(p.R0);
  res.geometric_bound =
      LogScalar::from_log(std::log(2.0) + ln_c + (p.m - 1.0 - p.a) * std::log(p.tau0) - 2.0 * p.m * ln_R0);
  LogAccumulator sum;
  double tau = p.tau0;
  for (long i = 0; i < p.max_steps; ++i) {
    ScheduleRow row;
    row.i = i;
    row.ln_R = ln_R0 + static_cast<double>(i) * std::log(2.0);
    row.tau = tau;
    row.step = step_size(p.L, p.R0, i, row.ln_R);
    row.bound_term = LogScalar::from_log(ln_c + (p.m - 1.0 - p.a) * std::log(tau) - 2.0 * p.m * row.ln_R);
    sum.add(row.bound_term);
    res.step_sum += row.step;
    tau = std::max(0.0, tau - row.step);
    res.rows.push_back(row);
    if (tau == 0.0) {
      res.terminated = true;
      break;
    }
  }
  res.steps_used = static_cast<long>(res.rows.size());
  res.telescoped_bound = sum.total();
  return res;
}

ProbeReport small_time_vanishing_probe(const std::function<LogScalar(double)>& ball_energy,
                                       std::span<const double> times) {
  ProbeReport rep;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    if (!(t > 0)) throw std::invalid_argument("probe times must be positive");
    if (k > 0 && !(t < times[k - 1])) throw std::invalid_argument("probe times must decrease");
    rep.samples.push_back({t, ball_energy(t) / LogScalar::from_real(t)});
  }
  constexpr std::size_t window = 5;
  if (rep.samples.size() < window + 1) return rep;
  bool ok = true;
  const double ln_half = std::log(0.5);
  for (std::size_t k = rep.samples.size() - window; k < rep.samples.size(); ++k) {
    const auto& prev = rep.samples[k - 1].value;
    const auto& cur = rep.samples[k].value;
    if (cur.is_zero()) continue;
    if (prev.is_zero()) {
      ok = false;
      break;
    }
    // relative slack for rounding in exactly-halving sequences
    ok = ok && cur.log_abs() <= prev.log_abs() + ln_half + 1e-12;
  }
  rep.vanishing = ok;
  return rep;
}

std::vector<double> halving_times(double t0, int count) {
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(std::ldexp(t0, -k));
  return out;
}

}  // namespace heatlab
