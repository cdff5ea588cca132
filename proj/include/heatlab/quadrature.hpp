#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "heatlab/logscalar.hpp"

namespace heatlab {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadOptions {
  double rel_tol = 1e-10;
  int max_subdivisions = 4000;
  bool throw_on_failure = true;
};

/// Result of a log-domain integral of a nonnegative integrand.
struct QuadResult {
  double ln_value = -std::numeric_limits<double>::infinity();
  double ln_error = -std::numeric_limits<double>::infinity();
  int evaluations = 0;
  int panels = 0;
  bool converged = true;

  LogScalar value() const { return LogScalar::from_log(ln_value); }
  /// Estimated error relative to the value (0 when both vanish).
  double rel_error() const {
    if (ln_error == -std::numeric_limits<double>::infinity()) return 0.0;
    return std::exp(ln_error - ln_value);
  }
};

namespace detail {

/// Gauss-Kronrod 21-point rule on [-1, 1]: abscissae x[0]=0 < ... < x[10],
/// Kronrod weights, and the embedded 10-point Gauss weights (zero where the
/// node is Kronrod-only).
struct Gk21 {
  std::array<double, 11> x;
  std::array<double, 11> wk;
  std::array<double, 11> wg;
};
const Gk21& gk21();

struct Panel {
  double a, b;
  double ln_value, ln_error;
};

inline double log_add(double x, double y) {
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  if (x == ninf) return y;
  if (y == ninf) return x;
  const double m = std::max(x, y);
  return m + std::log1p(std::exp(std::min(x, y) - m));
}

template <class F>
Panel eval_panel(F& ln_f, double a, double b, int& evals) {
  const Gk21& r = gk21();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, 21> l;
  l[0] = ln_f(mid);
  for (int k = 1; k <= 10; ++k) {
    l[2 * k - 1] = ln_f(mid - half * r.x[k]);
    l[2 * k] = ln_f(mid + half * r.x[k]);
  }
  evals += 21;
  double m = -std::numeric_limits<double>::infinity();
  for (double v : l) {
    if (std::isnan(v)) throw QuadratureError("integrand returned NaN");
    m = std::max(m, v);
  }
  Panel p{a, b, m, m};
  if (m == -std::numeric_limits<double>::infinity()) return p;
  if (m == std::numeric_limits<double>::infinity()) throw QuadratureError("integrand returned +inf");
  std::array<double, 21> e;
  for (int k = 0; k < 21; ++k) e[k] = std::exp(l[k] - m);
  double sk = r.wk[0] * e[0];
  double sg = r.wg[0] * e[0];
  for (int k = 1; k <= 10; ++k) {
    sk += r.wk[k] * (e[2 * k - 1] + e[2 * k]);
    sg += r.wg[k] * (e[2 * k - 1] + e[2 * k]);
  }
  // QUADPACK-style scaled error: |K - G| relative to the integrand's spread.
  const double mean = 0.5 * sk;
  double asc = r.wk[0] * std::fabs(e[0] - mean);
  for (int k = 1; k <= 10; ++k) {
    asc += r.wk[k] * (std::fabs(e[2 * k - 1] - mean) + std::fabs(e[2 * k] - mean));
  }
  double err = std::fabs(sk - sg);
  if (asc > 0 && err > 0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * sk);
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  p.ln_value = sk > 0 ? m + std::log(half * sk) : ninf;
  p.ln_error = err > 0 ? m + std::log(half * err) : ninf;
  return p;
}

}  // namespace detail

/// Sorted, deduplicated copy of `points` restricted to [lo, hi], with both
/// endpoints included.
std::vector<double> clean_breakpoints(std::vector<double> points, double lo, double hi);

/// Appends center +/- scale * 2^k, k = 0, 1, ..., for every point inside (lo, hi).
void add_graded_points(std::vector<double>& points, double center, double scale, double lo,
                       double hi);

/// Adaptive Gauss-Kronrod integration of exp(ln_f) over [breakpoints.front(),
/// breakpoints.back()]. Interior breakpoints seed the initial panels. Panels
/// are bisected worst-first until the summed error estimate falls below
/// rel_tol times the summed value. All accumulation is in log space, so
/// integrands spanning e^{+-700} and beyond are fine.
template <class F>
QuadResult integrate_log(F&& ln_f, std::span<const double> breakpoints, const QuadOptions& opt = {}) {
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  QuadResult res;
  if (breakpoints.size() < 2) throw std::invalid_argument("integrate_log: need at least two breakpoints");
  std::vector<detail::Panel> panels;
  panels.reserve(2 * breakpoints.size() + 16);
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i], b = breakpoints[i + 1];
    if (!(b > a)) continue;
    panels.push_back(detail::eval_panel(ln_f, a, b, res.evaluations));
  }
  const double ln_tol = std::log(opt.rel_tol);
  int splits = 0;
  while (true) {
    double total = ninf, err = ninf;
    std::size_t worst = panels.size();
    double worst_err = ninf;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      total = detail::log_add(total, panels[i].ln_value);
      err = detail::log_add(err, panels[i].ln_error);
      if (panels[i].ln_error > worst_err && panels[i].b > panels[i].a) {
        worst_err = panels[i].ln_error;
        worst = i;
      }
    }
    res.ln_value = total;
    res.ln_error = err;
    if (worst == panels.size() || err == ninf || err <= ln_tol + total) break;
    if (splits >= opt.max_subdivisions) {
      res.converged = false;
      if (opt.throw_on_failure) {
        throw QuadratureError("integrate_log: no convergence after " +
                              std::to_string(opt.max_subdivisions) + " subdivisions (rel err " +
                              std::to_string(std::exp(err - total)) + ")");
      }
      break;
    }
    const detail::Panel w = panels[worst];
    const double mid = 0.5 * (w.a + w.b);
    if (!(mid > w.a && mid < w.b)) {
      panels[worst].b = panels[worst].a;  // unresolvable in double precision; freeze
      continue;
    }
    panels[worst] = detail::eval_panel(ln_f, w.a, mid, res.evaluations);
    panels.push_back(detail::eval_panel(ln_f, mid, w.b, res.evaluations));
    ++splits;
  }
  res.panels = static_cast<int>(panels.size());
  return res;
}

/// integrate_log for expensive integrands: `batch(xs, out)` fills out[i] =
/// ln f(xs[i]) for a whole set of nodes at once (the 21 nodes of every seed
/// panel, then the 42 nodes of each bisection), so the caller may evaluate
/// them concurrently. Results do not depend on how the batch is scheduled.
template <class B>
QuadResult integrate_log_batched(B&& batch, std::span<const double> breakpoints, const QuadOptions& opt = {}) {
  std::vector<double> xs, ys;
  std::vector<std::pair<double, double>> pending;
  std::size_t cursor = 0;
  // Evaluates all nodes of `pending` panels, then serves them in order.
  auto run = [&] {
    const detail::Gk21& r = detail::gk21();
    xs.clear();
    for (const auto& [a, b] : pending) {
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      xs.push_back(mid);
      for (int k = 1; k <= 10; ++k) {
        xs.push_back(mid - half * r.x[k]);
        xs.push_back(mid + half * r.x[k]);
      }
    }
    ys.assign(xs.size(), 0.0);
    batch(std::span<const double>(xs), std::span<double>(ys));
    cursor = 0;
  };
  auto served = [&](double) { return ys[cursor++]; };
  constexpr double ninf = -std::numeric_limits<double>::infinity();
  QuadResult res;
  if (breakpoints.size() < 2) throw std::invalid_argument("integrate_log: need at least two breakpoints");
  std::vector<detail::Panel> panels;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i + 1] > breakpoints[i]) pending.emplace_back(breakpoints[i], breakpoints[i + 1]);
  }
  run();
  for (const auto& [a, b] : pending) panels.push_back(detail::eval_panel(served, a, b, res.evaluations));
  const double ln_tol = std::log(opt.rel_tol);
  int splits = 0;
  while (true) {
    double total = ninf, err = ninf;
    std::size_t worst = panels.size();
    double worst_err = ninf;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      total = detail::log_add(total, panels[i].ln_value);
      err = detail::log_add(err, panels[i].ln_error);
      if (panels[i].ln_error > worst_err && panels[i].b > panels[i].a) {
        worst_err = panels[i].ln_error;
        worst = i;
      }
    }
    res.ln_value = total;
    res.ln_error = err;
    if (worst == panels.size() || err == ninf || err <= ln_tol + total) break;
    if (splits >= opt.max_subdivisions) {
      res.converged = false;
      if (opt.throw_on_failure) {
        throw QuadratureError("integrate_log: no convergence after " + std::to_string(opt.max_subdivisions) +
                              " subdivisions");
      }
      break;
    }
    const detail::Panel w = panels[worst];
    const double mid = 0.5 * (w.a + w.b);
    if (!(mid > w.a && mid < w.b)) {
      panels[worst].b = panels[worst].a;
      continue;
    }
    pending = {{w.a, mid}, {mid, w.b}};
    run();
    panels[worst] = detail::eval_panel(served, w.a, mid, res.evaluations);
    panels.push_back(detail::eval_panel(served, mid, w.b, res.evaluations));
    ++splits;
  }
  res.panels = static_cast<int>(panels.size());
  return res;
}

template <class F>
QuadResult integrate_log(F&& ln_f, std::initializer_list<double> breakpoints, const QuadOptions& opt = {}) {
  return integrate_log(std::forward<F>(ln_f), std::span<const double>(breakpoints.begin(), breakpoints.size()), opt);
}

}  // namespace heatlab
