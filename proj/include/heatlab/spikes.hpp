#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "heatlab/estimator.hpp"
#include "heatlab/kernel.hpp"
#include "heatlab/logscalar.hpp"

namespace heatlab {

/// Spikes i = 1..i_max of height e^{i^3} centered at (i + 1/2) e_1, over a base.
struct Section3Config {
  int n = 3;
  int i_max = 3;
  BaseProfile base = base::Zero{};
  /// Multiplies every plateau height; 0 leaves the base alone.
  double height_factor = 1.0;

  /// Throws std::invalid_argument unless n >= 3, i_max >= 0 and the factor
  /// is finite and >= 0.
  void validate() const;
};

struct SpikeRadii {
  double ln_r = 0.0;       // outer radius, where the spike reaches the base
  double ln_rtilde = 0.0;  // plateau radius r / 2^{1/n}
};

/// r_i = (omega_n i^2 e^{i^3})^{-1/n}, rtilde_i = r_i / 2^{1/n}.
SpikeRadii spike_radii(int n, int i);

/// Throws std::logic_error if a spike ball leaves the annulus i < |x| < i + 1.
InitialData build_example(const Section3Config& cfg);

/// Lower bound for u on B(p_i, rtilde_i) at time t, for unit height factor:
/// (2 i^2)^{-1} (4 pi t)^{-n/2} e^{-rtilde_i^2 / t}.
LogScalar pointwise_lower_bound(int n, int i, double t);

/// Lower bounds for the integral over [0, 1] x B(p_i, rtilde_i) of u^2.
struct IntegralLowerBound {
  int n = 3;
  int i = 1;
  /// omega_n rtilde^n / (4 i^4) int_0^1 (4 pi t)^{-n} e^{-2 rtilde^2 / t} dt,
  /// via the upper incomplete gamma function Gamma(n - 1, 2 rtilde^2).
  LogScalar exact;
  /// The same with Gamma(n - 1, 1) in place of Gamma(n - 1, 2 rtilde^2).
  LogScalar floor;
  /// floor = C(n) i^{-q} e^{(n-2) i^3 / n}; these are ln C(n), q and (n-2) i^3 / n.
  double ln_C = 0.0;
  double q = 0.0;
  double target_exponent = 0.0;
  /// C(n) i^{-q} e^{target_exponent}, evaluated from the three numbers above.
  LogScalar asymptotic;
};

IntegralLowerBound integral_lower_bound(int n, int i);

/// ln C(n) = (2n - 2)/n ln omega_n - (2/n) ln 2 - n ln(8 pi) + ln Gamma(n - 1, 1).
double ln_section3_constant(int n);

struct ExampleOptions {
  /// Time weight for the membership check; needs a > n/2 - 1.
  double a = 2.0;
  /// Scales C of the quadratic classes L(r) = C r^2.
  std::vector<double> quadratic_grid{0.01, 0.1, 0.5, 1.0};
  /// The closed-form bound is followed up to this index.
  int closed_form_i_max = 10;
  int envelope_samples = 1000;
  std::uint64_t seed = 1;
  EstimatorOptions estimator;
};

struct SpikeCheck {
  int i = 0;
  double center = 0.0;
  SpikeRadii radii;
  /// Scaled by height_factor^2.
  IntegralLowerBound bound;
  /// Kernel-computed integrals of u^2 over [0, 1] x B(p_i, rtilde_i) and
  /// over [0, 1] x B(0, i + 1).
  IntegralReport patch;
  IntegralReport ball;
  bool patch_ok = false;
  bool ball_ok = false;
};

struct QuadraticCheck {
  double C = 1.0;
  /// Smallest i with ln(closed-form bound) > C (i + 1)^2, and the bound
  /// staying above through closed_form_i_max; 0 if there is none.
  int i_star = 0;
  /// Computed indices i at which ln(integral over B(0, i + 1)) > C (i + 1)^2.
  std::vector<int> detected;
  bool ok = false;
};

struct ExampleReport {
  Section3Config config;
  double a = 2.0;
  std::vector<SpikeCheck> spikes;
  EnvelopeReport envelope;
  /// ln ceiling for the membership check, -inf for zero data.
  double ceiling = 0.0;
  std::vector<IntegralReport> membership;
  std::vector<QuadraticCheck> quadratic;
  bool lower_bounds_ok = false;
  bool envelope_ok = false;
  bool membership_ok = false;
  bool violation_ok = false;
  bool passed() const { return lower_bounds_ok && envelope_ok && membership_ok && violation_ok; }
  std::vector<std::string> notes;
};

/// Runs the four checks: computed integrals against the closed-form lower
/// bounds, the L1 envelope on random samples, membership under the envelope
/// ceiling, and the quadratic-class violation.
ExampleReport verify_example(const Section3Config& cfg, const ExampleOptions& opt = {});

}  // namespace heatlab
