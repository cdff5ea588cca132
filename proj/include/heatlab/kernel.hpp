#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "heatlab/logscalar.hpp"
#include "heatlab/quadrature.hpp"
#include "heatlab/special.hpp"

namespace heatlab {

/// Plateau of height `height` on B(p, inner_radius), falling linearly in
/// radius to 0 at outer_radius, added on top of the base. Centers sit on the
/// first coordinate axis at p = center_distance e_1.
struct SpikeSpec {
  double center_distance = 0.0;
  double inner_radius = 0.0;
  double outer_radius = 0.0;
  LogScalar height;
};

namespace base {
struct Zero {};
struct Constant {
  double c = 0.0;
};
/// A exp(-|x|^2 / (2 sigma^2))
struct Gaussian {
  double A = 1.0;
  double sigma = 1.0;
};
/// h on B(0, rho)
struct BallIndicator {
  double rho = 1.0;
  double h = 1.0;
};
/// Piecewise linear in |x| through the nodes, equal to the first value
/// inside the first node and zero beyond the last.
struct RadialTable {
  std::vector<std::pair<double, double>> points;
};
}  // namespace base

using BaseProfile = std::variant<base::Zero, base::Constant, base::Gaussian, base::BallIndicator, base::RadialTable>;

/// A point of R^n described by its coordinate along the spike axis and its
/// distance from that axis. Every quantity here is axisymmetric, so this is
/// all the solver needs.
struct AxisPoint {
  double axial = 0.0;
  double radial = 0.0;

  double norm() const;
  double distance_to_axis_point(double d) const;
};

struct InitialData {
  int n = 3;
  BaseProfile base = base::Zero{};
  std::vector<SpikeSpec> spikes;

  /// Throws std::invalid_argument on bad parameters, negative base,
  /// degenerate or overlapping spikes.
  void validate() const;

  LogScalar value(const AxisPoint& x) const;
  double base_radial(double r) const;
  /// nullopt for the constant base (not integrable).
  std::optional<LogScalar> l1_norm() const;
  /// Upper bound on |u0|: sup of the base plus the largest spike height.
  LogScalar sup_bound() const;
  bool nonnegative() const;
};

/// (4 pi t)^{-n/2} exp(-distsq / 4t); throws std::domain_error for t <= 0.
LogScalar heat_kernel(int n, double distsq, double t);

struct KernelOptions {
  double rel_tol = 1e-10;
  int max_subdivisions = 4000;
  AngularRule angular = AngularRule::closed_form;
};

/// One radially symmetric piece of the data, centered on the axis.
struct RadialBump {
  double center = 0.0;  // axial coordinate of the center
  LogScalar scale;      // multiplies the shape
  enum class Shape { gaussian, plateau_linear, table } shape = Shape::plateau_linear;
  double p1 = 0.0;  // sigma | inner radius
  double p2 = 0.0;  //       | outer radius
  std::shared_ptr<const std::vector<std::pair<double, double>>> table;

  /// ln of shape(s) (without the scale); -inf outside the support.
  double ln_shape(double s) const;
  /// ln_shape(base + offset), resolving kinks finer than the spacing of
  /// doubles near base.
  double ln_shape(double base, double offset) const;
  double support_end() const;
  /// shape is constant on [0, flat_until].
  double flat_until() const;
  std::vector<double> kinks() const;
};

/// L1 norm of the bump's data (|scale| times the shape mass).
LogScalar bump_l1_norm(int n, const RadialBump& b);

/// u(x, t) for the data sum of a bump: integral of kernel times bump.
LogScalar bump_contribution(int n, const RadialBump& b, const AxisPoint& x, double t, const KernelOptions& opt);

/// Immutable evolved solution: the data plus quadrature settings.
class SolutionHandle {
 public:
  explicit SolutionHandle(InitialData data, KernelOptions opt = {});

  const InitialData& data() const { return data_; }
  const KernelOptions& options() const { return opt_; }
  int dimension() const { return data_.n; }

  /// u(x, t), t > 0.
  LogScalar evolve_point(const AxisPoint& x, double t) const;
  LogScalar base_contribution(const AxisPoint& x, double t) const;
  LogScalar spike_contribution(std::size_t index, const AxisPoint& x, double t) const;
  /// Radial bumps making up the non-constant data (base first, if any).
  const std::vector<RadialBump>& bumps() const { return bumps_; }
  /// Constant part of the solution (the constant base), else zero.
  double constant_part() const { return constant_; }
  std::size_t base_bump_count() const { return base_bumps_; }

 private:
  InitialData data_;
  KernelOptions opt_;
  std::vector<RadialBump> bumps_;
  std::size_t base_bumps_ = 0;
  double constant_ = 0.0;
};

LogScalar evolve_point(const SolutionHandle& sol, const AxisPoint& x, double t);

/// Integral of one spike against the kernel, outside any solution handle.
LogScalar spike_contribution(int n, const SpikeSpec& spike, const AxisPoint& x, double t,
                             const KernelOptions& opt = {});

/// Kernel mass of B(p, rho) seen from a point at distance d from p.
LogScalar ball_gaussian_mass(int n, double d, double rho, double t, const KernelOptions& opt = {});
/// The same at d = 0 through the one-dimensional radial integral.
LogScalar ball_gaussian_mass_radial(int n, double rho, double t, double rel_tol = 1e-12);

/// ||u0||_1 / (4 pi t)^{n/2}; nullopt when the data is not integrable.
std::optional<LogScalar> linf_envelope(const SolutionHandle& sol, double t);

struct FdmOptions {
  int n = 3;
  double r_max = 8.0;
  double dr = 1e-3;
  double dt = 0.0;  // 0 picks the largest stable step
  /// Radii where the profile has kinks or jumps; cell averages split there.
  std::vector<double> kinks;
};

struct RadialSnapshot {
  double t = 0.0;
  std::vector<double> r;  // cell centers k dr
  std::vector<double> u;  // cell averages
  /// Mass sigma_{n-1} sum V_k u_k and the mass lost through r_max so far.
  double mass = 0.0;
  double boundary_outflow = 0.0;

  /// Linear interpolation between cell centers.
  double at(double radius) const;
};

/// Explicit finite-volume solver for u_t = u_rr + (n-1)/r u_r with u_r(0) = 0
/// and u(r_max) = 0. Throws std::invalid_argument if dt exceeds the stable
/// step min(dr^2/4, dr^2/(2n)), or std::runtime_error if more than 1e-6 of the
/// mass leaves through r_max.
std::vector<RadialSnapshot> radial_fdm_solve(const std::function<double(double)>& profile, const FdmOptions& opt,
                                             std::vector<double> times);
RadialSnapshot radial_fdm_solve(const std::function<double(double)>& profile, const FdmOptions& opt, double T);

}  // namespace heatlab
