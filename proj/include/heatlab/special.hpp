#pragma once

namespace heatlab {

/// ln of the volume of the unit ball in R^n.
double ln_unit_ball_volume(int n);

/// ln of the surface area of the unit sphere S^{n-1} in R^n (n = 1 gives ln 2).
double ln_unit_sphere_area(int n);

/// ln(1 - e^x) for x <= 0.
double log1mexp(double x);

/// ln(e^x - 1) for x > 0.
double log_expm1(double x);

/// ln Gamma(a, x) = ln of the integral of s^{a-1} e^{-s} over [x, inf).
///
/// Defined for every real a when x > 0 and for a > 0 when x = 0. Continued
/// fraction for x >= max(1, a + 1); series otherwise, with upward recurrence
/// from a + k > 0 (or from E1 at integer a <= 0).
double ln_upper_gamma(double a, double x);

enum class AngularRule {
  /// Closed form where one exists (n = 1, 3); quadrature in theta otherwise.
  closed_form,
  /// Always integrate over the polar angle numerically.
  quadrature,
};

/// ln of the integral over the unit sphere S^{n-1} of exp(-z (1 - w_1)).
///
/// This is the angular part of the heat kernel integrated over a shell:
/// for |x - p| = d and a shell of radius s around p,
///   int_{|y-p|=s} exp(-|x-y|^2/4t) dS = s^{n-1} e^{-(d-s)^2/4t} * exp(this)
/// with z = d s / (2t).
double ln_shell_angular_factor(int n, double z, AngularRule rule = AngularRule::closed_form,
                               double rel_tol = 1e-12);

/// ln of the measure of { w in S^{n-1} : u_lo <= 1 - w_1 <= u_hi }, 0 <= u_lo <= u_hi <= 2.
double ln_sphere_band_measure(int n, double u_lo, double u_hi);

}  // namespace heatlab
