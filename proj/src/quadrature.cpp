#include "heatlab/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace heatlab {

namespace detail {

const Gk21& gk21() {
  static const Gk21 rule = [] {
    using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
    using Gauss = boost::math::quadrature::gauss<double, 10>;
    Gk21 r{};
    const auto& xk = Kronrod::abscissa();
    const auto& wk = Kronrod::weights();
    const auto& xg = Gauss::abscissa();
    const auto& wg = Gauss::weights();
    for (int i = 0; i < 11; ++i) {
      r.x[i] = xk[i];
      r.wk[i] = wk[i];
      r.wg[i] = 0.0;
    }
    // Gauss nodes coincide with the odd-indexed Kronrod nodes.
    for (std::size_t j = 0; j < xg.size(); ++j) {
      for (int i = 0; i < 11; ++i) {
        if (std::fabs(xk[i] - xg[j]) < 1e-15) r.wg[i] = wg[j];
      }
    }
    return r;
  }();
  return rule;
}

}  // namespace detail

std::vector<double> clean_breakpoints(std::vector<double> points, double lo, double hi) {
  if (!(hi >= lo)) throw std::invalid_argument("clean_breakpoints: hi < lo");
  std::vector<double> out;
  out.reserve(points.size() + 2);
  out.push_back(lo);
  for (double p : points) {
    if (std::isfinite(p) && p > lo && p < hi) out.push_back(p);
  }
  out.push_back(hi);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void add_graded_points(std::vector<double>& points, double center, double scale, double lo,
                       double hi) {
  if (!(scale > 0) || !std::isfinite(scale)) return;
  if (center > lo && center < hi) points.push_back(center);
  for (double step = scale;; step *= 2.0) {
    const double left = center - step;
    const double right = center + step;
    const bool in_left = left > lo && left < hi;
    const bool in_right = right > lo && right < hi;
    if (in_left) points.push_back(left);
    if (in_right) points.push_back(right);
    if (left <= lo && right >= hi) break;
    if (step > 1e300) break;
  }
}

}  // namespace heatlab
