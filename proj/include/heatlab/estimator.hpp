#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "heatlab/growth.hpp"
#include "heatlab/kernel.hpp"
#include "heatlab/logscalar.hpp"

namespace heatlab {

/// Ball B(center e_1, radius) on the spike axis.
struct Region {
  double center = 0.0;
  double radius = 1.0;
};

struct EstimatorOptions {
  /// Relative tolerance for the spatial and time quadratures.
  double rel_tol = 1e-6;
  /// The analytically bounded part of the time integral near t = 0 must stay
  /// below this fraction of the computed value.
  double tail_rel = 1e-10;
  int threads = 1;
};

/// Integral over the region of |u(., t)|^p, with its error estimate.
struct SpatialIntegral {
  LogScalar value;
  /// Estimated absolute error, as a fraction of |value|.
  double rel_error = 0.0;
};

SpatialIntegral spatial_integral(const SolutionHandle& sol, const Region& omega, double p, double t,
                                 const EstimatorOptions& opt = {});

struct Comparison {
  double L_value = 0.0;
  /// L(radius) - ln(value (1 + rel_error)); >= 0 means inside the class.
  double margin = 0.0;
  bool inside = false;
};

struct IntegralReport {
  Region region;
  double p = 2.0;
  double a = 0.0;
  /// Integral over [0, 1] x region of t^a |u|^p.
  LogScalar value;
  /// value^{1/p}
  LogScalar norm;
  /// Combined relative error: quadratures, skipped cross terms and the tail.
  double quadrature_error_estimate = 0.0;
  /// Below t_floor the integral is bounded, not computed.
  double t_floor = 0.0;
  LogScalar tail_bound;
  int time_evaluations = 0;
  std::optional<Comparison> comparison;
  bool cancelled = false;
};

/// Integral of t^a |u|^p over [0, 1] x region, in log time with an analytic
/// bound for the part below t_floor.
IntegralReport spacetime_integral(const SolutionHandle& sol, const Region& omega, double p, double a,
                                  const EstimatorOptions& opt = {});

/// Integral over [0, 1] x B(0, radius) of t^a u^2.
IntegralReport weighted_spacetime_l2(const SolutionHandle& sol, double a, double radius,
                                     const EstimatorOptions& opt = {});

/// (Integral over [0, 1] x B(0, radius) of |u|^p)^{1/p}; the report carries
/// both the integral and its 1/p power.
IntegralReport lp_spacetime_norm(const SolutionHandle& sol, double p, double radius, const EstimatorOptions& opt = {});

/// Per radius: ln of the weighted integral against L(radius). Inside iff
/// ln(value (1 + error)) <= L(radius).
std::vector<IntegralReport> class_membership(const SolutionHandle& sol, double a, const GrowthFunction& L,
                                             std::span<const double> radii, const EstimatorOptions& opt = {});

struct EnvelopeSample {
  AxisPoint x;
  double t = 0.0;
};

struct EnvelopeViolation {
  EnvelopeSample sample;
  LogScalar value;
  LogScalar envelope;
  /// ln u - ln envelope (> 0)
  double margin = 0.0;
};

struct EnvelopeReport {
  std::size_t checked = 0;
  std::vector<EnvelopeViolation> violations;
  /// max over samples of ln u - ln envelope
  double worst_margin = -std::numeric_limits<double>::infinity();
};

EnvelopeReport pointwise_envelope_check(const SolutionHandle& sol,
                                        const std::function<LogScalar(const AxisPoint&, double)>& envelope,
                                        std::span<const EnvelopeSample> samples, int threads = 1);

/// ln of a bound on the weighted integral valid at every radius, from
/// int u^2 <= ||u||_inf ||u||_1 <= M^2 (4 pi t)^{-n/2} with M = ||u0||_1:
/// ln(M^2 (4 pi)^{-n/2} / (a - n/2 + 1)). Requires a > n/2 - 1.
double membership_ceiling(const SolutionHandle& sol, double a);

}  // namespace heatlab
