#include "heatlab/growth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "heatlab/quadrature.hpp"

namespace heatlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_scale(double C) {
  if (!(C > 0) || !std::isfinite(C)) throw std::invalid_argument("scale C must be positive and finite");
}

void validate(const family::Power& f) {
  check_scale(f.C);
  if (!(f.beta >= 0) || !std::isfinite(f.beta)) throw std::invalid_argument("beta must be >= 0");
}

void validate(const family::PowerLog& f) {
  check_scale(f.C);
  if (!(f.beta >= 0) || !std::isfinite(f.beta)) throw std::invalid_argument("beta must be >= 0");
  if (!std::isfinite(f.gamma)) throw std::invalid_argument("gamma must be finite");
  // (e + r) ln(e + r) > r, so beta >= -gamma keeps r^beta ln^gamma(e + r) nondecreasing.
  if (f.gamma < 0 && f.beta < -f.gamma) {
    throw std::invalid_argument("power_log with gamma < 0 needs beta >= -gamma to stay nondecreasing");
  }
}

void validate(const family::Constant& f) { check_scale(f.C); }

void validate(const family::MonotoneTable& f) {
  if (f.points.empty()) throw std::invalid_argument("table needs at least one point");
  for (std::size_t i = 0; i < f.points.size(); ++i) {
    const auto [r, v] = f.points[i];
    if (!(r >= 0) || !std::isfinite(r)) throw std::invalid_argument("table radii must be finite and >= 0");
    if (!(v > 0) || !std::isfinite(v)) throw std::invalid_argument("table values must be positive");
    if (i > 0) {
      if (!(r > f.points[i - 1].first)) throw std::invalid_argument("table radii must be strictly increasing");
      if (v < f.points[i - 1].second) throw std::invalid_argument("table values must be nondecreasing");
    }
  }
}

double eval_power(const family::Power& f, double r) {
  if (f.beta == 0) return f.C;
  return f.C * std::pow(r, f.beta);
}

double ln_e_plus(double s) {  // ln(ln(e + e^s))
  const double x = s > 1.0 ? s + std::log1p(std::exp(1.0 - s)) : 1.0 + std::log1p(std::exp(s - 1.0));
  return std::log(x);
}

double eval_power_log(const family::PowerLog& f, double r) {
  const double lg = std::log(std::numbers::e + r);
  return f.C * (f.beta == 0 ? 1.0 : std::pow(r, f.beta)) * std::pow(lg, f.gamma);
}

double last_slope(const family::MonotoneTable& f) {
  const auto& p = f.points;
  if (p.size() < 2) return 0.0;
  const auto& a = p[p.size() - 2];
  const auto& b = p.back();
  return (b.second - a.second) / (b.first - a.first);
}

double eval_table(const family::MonotoneTable& f, double r) {
  const auto& p = f.points;
  if (r <= p.front().first) return p.front().second;
  if (r >= p.back().first) return p.back().second + last_slope(f) * (r - p.back().first);
  auto it = std::upper_bound(p.begin(), p.end(), r, [](double x, const auto& q) { return x < q.first; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (r - lo.first) / (hi.first - lo.first);
  return lo.second + w * (hi.second - lo.second);
}

double ln_eval_table(const family::MonotoneTable& f, double s) {
  const double r = std::exp(s);
  if (std::isfinite(r)) return std::log(eval_table(f, r));
  const double slope = last_slope(f);
  return slope > 0 ? std::log(slope) + s : std::log(f.points.back().second);
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

std::string describe_family(const auto& fam) {
  return std::visit(overloaded{
                        [](const family::Power& f) { return "power(C=" + fmt(f.C) + ", beta=" + fmt(f.beta) + ")"; },
                        [](const family::PowerLog& f) {
                          return "power_log(C=" + fmt(f.C) + ", beta=" + fmt(f.beta) + ", gamma=" + fmt(f.gamma) + ")";
                        },
                        [](const family::Constant& f) { return "constant(C=" + fmt(f.C) + ")"; },
                        [](const family::MonotoneTable& f) {
                          return "table(" + std::to_string(f.points.size()) + " points)";
                        },
                        [](const GrowthFunction::FromCurvature& f) {
                          return "from_curvature(C=" + fmt(f.C) + ", k=" + f.k.describe() + ")";
                        },
                    },
                    fam);
}

// Integral of exp(ln_g(s)) over s in [s0, s1]; s1 may be +inf.
template <class G>
double integrate_in_log_radius(G&& ln_g, double s0, double s1, double rel_tol) {
  QuadOptions opt;
  opt.rel_tol = rel_tol;
  if (std::isfinite(s1)) {
    if (!(s1 > s0)) return 0.0;
    // Unit-length seed panels keep table kinks and log corners resolved.
    std::vector<double> pts;
    for (double s = std::ceil(s0); s < s1 && pts.size() < 4096; s += std::max(1.0, (s1 - s0) / 4096)) {
      pts.push_back(s);
    }
    const auto bp = clean_breakpoints(std::move(pts), s0, s1);
    return std::exp(integrate_log(ln_g, bp, opt).ln_value);
  }
  // Geometric chunks until the last one is negligible.
  double total = 0.0;
  double a = s0;
  double len = 8.0;
  for (int chunk = 0; chunk < 200; ++chunk) {
    const double b = a + len;
    const double piece = std::exp(integrate_log(ln_g, {a, b}, opt).ln_value);
    total += piece;
    if (piece <= 0.1 * rel_tol * total && chunk > 2) return total;
    if (b > 1e12) break;
    a = b;
    len *= 1.5;
  }
  throw QuadratureError("improper integral did not converge (integrand decays too slowly or diverges)");
}

template <class LnF>
OsgoodVerdict numeric_doubling(LnF&& ln_integrand) {
  constexpr int k0 = 4;
  constexpr int k1 = 40;
  OsgoodVerdict v;
  v.method = OsgoodMethod::numeric_doubling;
  double partial = integrate_in_log_radius(ln_integrand, 0.0, k0 * std::numbers::ln2, 1e-10);
  for (int k = k0; k < k1; ++k) {
    const double d = integrate_in_log_radius(ln_integrand, k * std::numbers::ln2, (k + 1) * std::numbers::ln2, 1e-10);
    v.increments.push_back(d);
    partial += d;
  }
  v.partial_integral = partial;
  v.probe_radius = std::ldexp(1.0, k1);
  v.verdict = classify_increments(v.increments, k0);
  return v;
}

OsgoodVerdict analytic(Verdict verdict, double partial, double probe) {
  OsgoodVerdict v;
  v.method = OsgoodMethod::analytic;
  v.verdict = verdict;
  v.partial_integral = partial;
  v.probe_radius = probe;
  return v;
}

constexpr double kAnalyticProbe = 1048576.0;  // 2^20

std::optional<Verdict> curvature_table_verdict(const CurvatureFunction::Family& fam) {
  return std::visit(overloaded{
                        [](const family::Power& f) -> std::optional<Verdict> {
                          return f.beta <= 1 ? Verdict::divergent : Verdict::convergent;
                        },
                        [](const family::PowerLog& f) -> std::optional<Verdict> {
                          return (f.beta < 1 || (f.beta == 1 && f.gamma <= 1)) ? Verdict::divergent
                                                                              : Verdict::convergent;
                        },
                        [](const family::Constant&) -> std::optional<Verdict> { return Verdict::divergent; },
                        [](const family::MonotoneTable&) -> std::optional<Verdict> { return std::nullopt; },
                    },
                    fam);
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::divergent: return "Divergent";
    case Verdict::convergent: return "Convergent";
    case Verdict::inconclusive: return "Inconclusive";
  }
  return "?";
}

std::string to_string(OsgoodMethod m) {
  return m == OsgoodMethod::analytic ? "analytic" : "numeric-doubling";
}

CurvatureFunction::CurvatureFunction(Family f) : family_(std::move(f)) {
  std::visit([](const auto& x) { validate(x); }, family_);
}

double CurvatureFunction::eval(double r) const {
  if (!(r >= 0)) throw std::domain_error("radius must be >= 0");
  return std::visit(overloaded{
                        [&](const family::Power& f) { return eval_power(f, r); },
                        [&](const family::PowerLog& f) { return eval_power_log(f, r); },
                        [&](const family::Constant& f) { return f.C; },
                        [&](const family::MonotoneTable& f) { return eval_table(f, r); },
                    },
                    family_);
}

double CurvatureFunction::ln_eval(double s) const {
  return std::visit(overloaded{
                        [&](const family::Power& f) { return std::log(f.C) + f.beta * s; },
                        [&](const family::PowerLog& f) {
                          return std::log(f.C) + f.beta * s + f.gamma * ln_e_plus(s);
                        },
                        [&](const family::Constant& f) { return std::log(f.C); },
                        [&](const family::MonotoneTable& f) { return ln_eval_table(f, s); },
                    },
                    family_);
}

std::string CurvatureFunction::describe() const { return describe_family(family_); }

GrowthFunction::GrowthFunction(Family f) : family_(std::move(f)) {
  std::visit(overloaded{
                 [](const FromCurvature& c) { check_scale(c.C); },
                 // a constant bound may sit at any level, including ln-scale negatives
                 [](const family::Constant& c) {
                   if (!std::isfinite(c.C)) throw std::invalid_argument("constant must be finite");
                 },
                 [](const auto& x) { validate(x); },
             },
             family_);
}

double GrowthFunction::eval(double r) const {
  if (!(r >= 0)) throw std::domain_error("radius must be >= 0");
  return std::visit(overloaded{
                        [&](const family::Power& f) { return eval_power(f, r); },
                        [&](const family::PowerLog& f) { return eval_power_log(f, r); },
                        [&](const family::Constant& f) { return f.C; },
                        [&](const family::MonotoneTable& f) { return eval_table(f, r); },
                        [&](const FromCurvature& f) { return f.C * r * f.k.eval(2.0 * r); },
                    },
                    family_);
}

double GrowthFunction::ln_eval(double s) const {
  return std::visit(overloaded{
                        [&](const family::Power& f) { return std::log(f.C) + f.beta * s; },
                        [&](const family::PowerLog& f) {
                          return std::log(f.C) + f.beta * s + f.gamma * ln_e_plus(s);
                        },
                        [&](const family::Constant& f) { return std::log(f.C); },
                        [&](const family::MonotoneTable& f) { return ln_eval_table(f, s); },
                        [&](const FromCurvature& f) {
                          return std::log(f.C) + s + f.k.ln_eval(s + std::numbers::ln2);
                        },
                    },
                    family_);
}

bool GrowthFunction::closed_form() const {
  return std::visit(overloaded{
                        [](const family::MonotoneTable&) { return false; },
                        [](const FromCurvature& f) { return curvature_table_verdict(f.k.family()).has_value(); },
                        [](const auto&) { return true; },
                    },
                    family_);
}

std::string GrowthFunction::describe() const { return describe_family(family_); }

bool GrowthFunction::positive() const {
  const auto* c = std::get_if<family::Constant>(&family_);
  return !c || c->C > 0;
}

void GrowthFunction::require_positive(const char* who) const {
  if (!positive()) throw std::invalid_argument(std::string(who) + ": growth function must be positive");
}

double osgood_integral(const GrowthFunction& L, double r_max, double rel_tol) {
  if (!(r_max > 1)) throw std::invalid_argument("osgood_integral: r_max must be > 1");
  L.require_positive("osgood_integral");
  auto ln_g = [&](double s) { return 2.0 * s - L.ln_eval(s); };
  return integrate_in_log_radius(ln_g, 0.0, std::log(r_max), rel_tol);
}

double curvature_integral(const CurvatureFunction& k, double r_max, double rel_tol) {
  if (!(r_max > 1)) throw std::invalid_argument("curvature_integral: r_max must be > 1");
  auto ln_g = [&](double s) { return s - k.ln_eval(s); };
  return integrate_in_log_radius(ln_g, 0.0, std::log(r_max), rel_tol);
}

Verdict classify_increments(const std::vector<double>& inc, int k0) {
  constexpr std::size_t window = 8;
  if (inc.size() < window + 1) return Verdict::inconclusive;
  for (double d : inc) {
    if (!(d > 0) || !std::isfinite(d)) return Verdict::inconclusive;
  }
  const std::size_t n = inc.size();
  bool all_small = true;
  bool all_large = true;
  for (std::size_t j = n - window; j < n; ++j) {
    const double ratio = inc[j] / inc[j - 1];
    all_small = all_small && ratio < 0.7;
    all_large = all_large && ratio > 0.95;
  }
  // Tail exponent p in inc_k ~ k^{-p} by least squares over the last window + 1 increments.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = window + 1;
  for (std::size_t j = n - window - 1; j < n; ++j) {
    const double x = std::log(static_cast<double>(k0 + static_cast<int>(j)));
    const double y = std::log(inc[j]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double p = -(m * sxy - sx * sy) / (m * sxx - sx * sx);
  if (all_small || p >= 1.5) return Verdict::convergent;
  if (all_large && p <= 1.1) return Verdict::divergent;
  return Verdict::inconclusive;
}

OsgoodVerdict classify_osgood_numeric(const GrowthFunction& L) {
  L.require_positive("classify_osgood_numeric");
  return numeric_doubling([&](double s) { return 2.0 * s - L.ln_eval(s); });
}

OsgoodVerdict classify_curvature_numeric(const CurvatureFunction& k) {
  return numeric_doubling([&](double s) { return s - k.ln_eval(s); });
}

OsgoodVerdict classify_osgood(const GrowthFunction& L) {
  L.require_positive("classify_osgood");
  const std::optional<Verdict> v = std::visit(
      overloaded{
          [](const family::Power& f) -> std::optional<Verdict> {
            return f.beta <= 2 ? Verdict::divergent : Verdict::convergent;
          },
          [](const family::PowerLog& f) -> std::optional<Verdict> {
            return (f.beta < 2 || (f.beta == 2 && f.gamma <= 1)) ? Verdict::divergent : Verdict::convergent;
          },
          [](const family::Constant&) -> std::optional<Verdict> { return Verdict::divergent; },
          [](const family::MonotoneTable&) -> std::optional<Verdict> { return std::nullopt; },
          // r / (C r k(2r)) = 1 / (C k(2r)): same verdict as the curvature integral.
          [](const GrowthFunction::FromCurvature& f) { return curvature_table_verdict(f.k.family()); },
      },
      L.family());
  if (!v) return classify_osgood_numeric(L);
  return analytic(*v, osgood_integral(L, kAnalyticProbe), kAnalyticProbe);
}

OsgoodVerdict classify_curvature(const CurvatureFunction& k) {
  const auto v = curvature_table_verdict(k.family());
  if (!v) return classify_curvature_numeric(k);
  return analytic(*v, curvature_integral(k, kAnalyticProbe), kAnalyticProbe);
}

Thm2Envelopes thm2_envelopes(const CurvatureFunction& k, const Thm2Constants& c) {
  if (!(c.C_pt > 0 && c.a > 0 && c.C_vol > 0 && c.c_vol > 0 && c.C_L > 0)) {
    throw std::invalid_argument("thm2_envelopes: constants must be positive");
  }
  Thm2Envelopes e{
      [k, c](double r, double t) {
        if (!(t > 0)) throw std::domain_error("pointwise envelope needs t > 0");
        return LogScalar::from_log(c.C_pt * r * k.eval(2.0 * r) - c.a * std::log(t));
      },
      [k, c](double R) { return LogScalar::from_log(std::log(c.C_vol) + c.c_vol * R * k.eval(R)); },
      GrowthFunction::from_curvature(c.C_L, k),
  };
  return e;
}

}  // namespace heatlab
