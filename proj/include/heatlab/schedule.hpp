#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "heatlab/growth.hpp"
#include "heatlab/logscalar.hpp"

namespace heatlab {

class SolutionHandle;

/// xi(r, t) = -(r - R)_+^2 / (4 (T - t)); throws std::domain_error for t >= T.
double xi_weight(double r, double R, double T, double t);

/// max over the grid of d_t xi + |grad xi|^2, with d_t xi by central
/// differences of step h and |grad xi| = (r - R)_+ / (2 (T - t)).
/// Throws std::domain_error if a grid point sits on the kink r = R or has t >= T.
double xi_eikonal_residual(double R, double T, std::span<const std::pair<double, double>> grid, double h = 1e-4);

/// 4^{2m-1} m^m
double cutoff_constant(double m);
double ln_cutoff_constant(double m);

/// C(m) T^{m-a-1} / R^{2m}
LogScalar inductive_rhs(double R, double T, double m, double a);

struct ScheduleParams {
  double R0 = 1.0;
  double tau0 = 1.0;
  double m = 2.0;
  double a = 0.5;
  GrowthFunction L = GrowthFunction::power(1.0, 2.0);
  long max_steps = 100000;
};

struct ScheduleRow {
  long i = 0;
  double ln_R = 0.0;
  double tau = 0.0;
  double step = 0.0;
  LogScalar bound_term;

  /// R_i = 2^i R0; +inf once it leaves double range (ln_R stays exact).
  double R() const;
};

struct ScheduleResult {
  std::vector<ScheduleRow> rows;
  bool terminated = false;
  long steps_used = 0;
  /// Sum of the step sizes over executed rows.
  double step_sum = 0.0;
  LogScalar telescoped_bound;
  /// 2 C(m) tau0^{m-1-a} / R0^{2m}
  LogScalar geometric_bound;
};

/// Greedy schedule tau_{i+1} = max(0, tau_i - R_i^2 / (16 L(2 R_i))).
/// Throws std::invalid_argument unless m > a + 1, 0 < tau0 <= 1, R0 > 0.
ScheduleResult build_schedule(const ScheduleParams& p);

struct ProbeSample {
  double t = 0.0;
  /// t^{-1} int_{B(R)} f^2
  LogScalar value;
};

struct ProbeReport {
  std::vector<ProbeSample> samples;
  bool vanishing = false;
};

/// Evaluates t^{-1} E(t) over the decreasing times, where E(t) is the
/// supplied ball energy. "Vanishing" means each of the last five probes is
/// at most half the previous one.
ProbeReport small_time_vanishing_probe(const std::function<LogScalar(double t)>& ball_energy,
                                       std::span<const double> times);

/// Same, with E(t) = int_{B(0,R)} u^2(t) computed from the convolution solver.
ProbeReport small_time_vanishing_probe(const SolutionHandle& sol, double R, std::span<const double> times);

/// Decreasing times t_k = t0 2^{-k}, k = 0..count-1.
std::vector<double> halving_times(double t0, int count);

}  // namespace heatlab
