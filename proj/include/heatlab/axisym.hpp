#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "heatlab/quadrature.hpp"
#include "heatlab/special.hpp"

namespace heatlab {

/// Sphere about an axis point q = center e_1 near which an integrand changes
/// on the length scale `width`.
struct FeatureSphere {
  double center = 0.0;
  double radius = 0.0;
  double width = 1.0;
};

/// Distances rho, rho +- width 2^k (k >= 0) inside [lo, hi], plus rho itself.
std::vector<double> graded_targets(double rho, double width, double lo, double hi);

/// Angles phi in (0, pi) measured from the direction of a point at distance
/// `delta` from the circle's center, at which a circle of radius s is at
/// distance `rho` from that point.
double crossing_angle(double delta, double s, double rho);

/// Integral over the ball B(c e_1, R) in R^n of exp(ln_f(axial, radial)),
/// for an axisymmetric integrand. Polar coordinates (s, theta) about the ball
/// center with the measure sigma_{n-2} s^{n-1} sin^{n-2}(theta); n = 1
/// integrates along the axis. Feature spheres seed breakpoints in both
/// variables. The inner integral runs at a tenth of the outer tolerance.
template <class F>
QuadResult integrate_axisym(int n, F&& ln_f, double c, double R, std::span<const FeatureSphere> features,
                            const QuadOptions& opt) {
  if (!(R > 0)) throw std::invalid_argument("integrate_axisym: radius must be > 0");
  if (n == 1) {
    std::vector<double> pts;
    for (const auto& f : features) {
      for (double sign : {-1.0, 1.0}) {
        for (double d : graded_targets(f.radius, f.width, 0.0, 2 * R + std::fabs(f.center - c))) {
          pts.push_back(f.center + sign * d);
        }
      }
    }
    const auto bp = clean_breakpoints(std::move(pts), c - R, c + R);
    return integrate_log([&](double x) { return ln_f(x, 0.0); }, bp, opt);
  }
  // Distances to feature centers that matter: graded targets around each sphere.
  struct Target {
    double delta;  // signed axial offset q - c
    std::vector<double> rho;
  };
  std::vector<Target> targets;
  std::vector<double> s_pts;
  for (const auto& f : features) {
    const double delta = f.center - c;
    const double ad = std::fabs(delta);
    Target t{delta, graded_targets(f.radius, f.width, 0.0, ad + R)};
    for (double rho : t.rho) {
      s_pts.push_back(std::fabs(ad - rho));
      s_pts.push_back(ad + rho);
    }
    targets.push_back(std::move(t));
  }
  const auto s_bp = clean_breakpoints(std::move(s_pts), 0.0, R);
  const double ln_sigma = ln_unit_sphere_area(n - 1);
  QuadOptions inner = opt;
  inner.rel_tol = 0.1 * opt.rel_tol;
  auto outer = [&](double s) {
    std::vector<double> th;
    for (const auto& t : targets) {
      const double ad = std::fabs(t.delta);
      if (ad == 0) continue;
      for (double rho : t.rho) {
        if (!(rho > std::fabs(ad - s) && rho < ad + s)) continue;
        const double phi = crossing_angle(ad, s, rho);
        th.push_back(t.delta > 0 ? phi : std::numbers::pi - phi);
      }
    }
    const auto th_bp = clean_breakpoints(std::move(th), 0.0, std::numbers::pi);
    auto ln_g = [&](double theta) {
      const double st = std::sin(theta);
      const double w = n == 2 ? 0.0 : (st > 0 ? (n - 2) * std::log(st) : -std::numeric_limits<double>::infinity());
      return ln_f(c + s * std::cos(theta), s * st) + w;
    };
    const auto r = integrate_log(ln_g, th_bp, inner);
    return r.ln_value + ln_sigma + (n - 1) * std::log(s);
  };
  return integrate_log(outer, s_bp, opt);
}

/// Piecewise Chebyshev interpolant (degree 16 per panel) of a smooth function
/// on [lo, hi]. Panels are bisected until the interpolant matches the
/// function to `abs_tol` at two off-node probes per panel.
class ChebyshevTable {
 public:
  static constexpr int kDegree = 16;

  template <class F>
  ChebyshevTable(F&& f, std::vector<double> breakpoints, double abs_tol, int max_panels = 4000);

  double operator()(double x) const;
  double lo() const { return panels_.front().a; }
  double hi() const { return panels_.back().b; }
  std::size_t panel_count() const { return panels_.size(); }
  long evaluations() const { return evaluations_; }
  /// False if some panel was kept without meeting the tolerance.
  bool accurate() const { return accurate_; }

 private:
  struct Panel {
    double a, b;
    std::array<double, kDegree + 1> v;
  };
  static double node(int k, double a, double b);
  double eval_panel(const Panel& p, double x) const;
  std::vector<Panel> panels_;
  long evaluations_ = 0;
  bool accurate_ = true;
};

template <class F>
ChebyshevTable::ChebyshevTable(F&& f, std::vector<double> breakpoints, double abs_tol, int max_panels) {
  if (breakpoints.size() < 2) throw std::invalid_argument("ChebyshevTable: need at least two breakpoints");
  struct Work {
    double a, b;
    int depth;
  };
  std::vector<Work> stack;
  for (std::size_t i = breakpoints.size() - 1; i-- > 0;) {
    if (breakpoints[i + 1] > breakpoints[i]) stack.push_back({breakpoints[i], breakpoints[i + 1], 0});
  }
  while (!stack.empty()) {
    const Work w = stack.back();
    stack.pop_back();
    Panel p{w.a, w.b, {}};
    for (int k = 0; k <= kDegree; ++k) p.v[k] = f(node(k, w.a, w.b));
    evaluations_ += kDegree + 1;
    bool ok = true;
    for (double frac : {0.2113, 0.7887}) {  // away from the Chebyshev nodes
      const double x = w.a + frac * (w.b - w.a);
      const double exact = f(x);
      ++evaluations_;
      ok = ok && std::fabs(exact - eval_panel(p, x)) <= abs_tol;
    }
    const double mid = 0.5 * (w.a + w.b);
    const bool splittable = mid > w.a && mid < w.b && w.depth < 60 &&
                            static_cast<int>(panels_.size() + stack.size()) < max_panels;
    if (ok || !splittable) {
      accurate_ = accurate_ && ok;
      panels_.push_back(p);
    } else {
      stack.push_back({mid, w.b, w.depth + 1});
      stack.push_back({w.a, mid, w.depth + 1});
    }
  }
}

}  // namespace heatlab
