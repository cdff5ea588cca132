#include "heatlab/axisym.hpp"

#include <algorithm>

namespace heatlab {

std::vector<double> graded_targets(double rho, double width, double lo, double hi) {
  std::vector<double> out;
  if (rho >= lo && rho <= hi) out.push_back(rho);
  if (!(width > 0) || !std::isfinite(width)) return out;
  for (double step = width; step < 2 * (hi - lo) + width; step *= 2) {
    if (rho - step >= lo && rho - step <= hi) out.push_back(rho - step);
    if (rho + step >= lo && rho + step <= hi) out.push_back(rho + step);
    if (rho - step < lo && rho + step > hi) break;
  }
  return out;
}

double crossing_angle(double delta, double s, double rho) {
  // 1 - cos(phi) = (rho - delta + s)(rho + delta - s) / (2 delta s), free of cancellation
  const double one_minus_cos = (rho - delta + s) * (rho + delta - s) / (2 * delta * s);
  const double h = std::clamp(0.5 * one_minus_cos, 0.0, 1.0);
  return 2 * std::asin(std::sqrt(h));
}

namespace {

const std::array<double, ChebyshevTable::kDegree + 1>& lobatto() {
  static const auto x = [] {
    std::array<double, ChebyshevTable::kDegree + 1> v{};
    for (int k = 0; k <= ChebyshevTable::kDegree; ++k) v[k] = std::cos(std::numbers::pi * k / ChebyshevTable::kDegree);
    return v;
  }();
  return x;
}

}  // namespace

double ChebyshevTable::node(int k, double a, double b) { return 0.5 * (a + b) + 0.5 * (b - a) * lobatto()[k]; }

double ChebyshevTable::eval_panel(const Panel& p, double x) const {
  const auto& nodes = lobatto();
  const double u = (2 * x - p.a - p.b) / (p.b - p.a);
  double num = 0, den = 0;
  for (int k = 0; k <= kDegree; ++k) {
    const double d = u - nodes[k];
    if (d == 0) return p.v[k];
    double w = (k % 2 ? -1.0 : 1.0) / d;
    if (k == 0 || k == kDegree) w *= 0.5;
    num += w * p.v[k];
    den += w;
  }
  return num / den;
}

double ChebyshevTable::operator()(double x) const {
  if (x <= panels_.front().a) return eval_panel(panels_.front(), x);
  auto it = std::upper_bound(panels_.begin(), panels_.end(), x, [](double v, const Panel& p) { return v < p.b; });
  if (it == panels_.end()) --it;
  return eval_panel(*it, x);
}

}  // namespace heatlab
