#include "heatlab/kernel.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace heatlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Kernel factors e^{-w^2/4t} with w beyond this many sqrt(t) are below e^{-196}.
constexpr double kWidths = 28.0;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

double table_value(const std::vector<std::pair<double, double>>& p, double s) {
  if (s <= p.front().first) return p.front().second;
  if (s > p.back().first) return 0.0;
  auto it = std::upper_bound(p.begin(), p.end(), s, [](double x, const auto& q) { return x < q.first; });
  if (it == p.end()) return p.back().second;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (s - lo.first) / (hi.first - lo.first);
  return lo.second + w * (hi.second - lo.second);
}

// Spike shape at distance s from its center: 1 on the plateau, linear ramp to 0.
double spike_shape(double s, double inner, double outer) {
  if (s <= inner) return 1.0;
  if (s >= outer) return 0.0;
  return (outer - s) / (outer - inner);
}

// ln of sigma_{n-1} * (radial integral of the spike shape times s^{n-1}) / r^n
double ln_spike_shape_mass(int n, double inner, double outer) {
  const double c = inner / outer;
  const double cn = std::pow(c, n);
  double ramp = 0.0;
  if (c < 1.0) ramp = ((1.0 - cn) / n - (1.0 - cn * c) / (n + 1)) / (1.0 - c);
  return ln_unit_sphere_area(n) + n * std::log(outer) + std::log(cn / n + ramp);
}

}  // namespace

double AxisPoint::norm() const { return std::hypot(axial, radial); }

double AxisPoint::distance_to_axis_point(double d) const { return std::hypot(axial - d, radial); }

void InitialData::validate() const {
  require(n >= 1, "dimension must be >= 1");
  std::visit(overloaded{
                 [](const base::Zero&) {},
                 [](const base::Constant& b) { require(b.c >= 0 && std::isfinite(b.c), "constant base must be >= 0"); },
                 [](const base::Gaussian& b) {
                   require(b.A >= 0 && std::isfinite(b.A), "gaussian amplitude must be >= 0");
                   require(b.sigma > 0 && std::isfinite(b.sigma), "gaussian sigma must be > 0");
                 },
                 [](const base::BallIndicator& b) {
                   require(b.rho > 0 && std::isfinite(b.rho), "ball radius must be > 0");
                   require(b.h >= 0 && std::isfinite(b.h), "ball height must be >= 0");
                 },
                 [](const base::RadialTable& b) {
                   require(!b.points.empty(), "radial table needs at least one node");
                   for (std::size_t i = 0; i < b.points.size(); ++i) {
                     require(b.points[i].first >= 0 && std::isfinite(b.points[i].first), "table radii must be >= 0");
                     require(b.points[i].second >= 0 && std::isfinite(b.points[i].second),
                             "table values must be >= 0");
                     if (i > 0) require(b.points[i].first > b.points[i - 1].first, "table radii must increase");
                   }
                 },
             },
             base);
  for (std::size_t i = 0; i < spikes.size(); ++i) {
    const auto& s = spikes[i];
    require(s.center_distance >= 0 && std::isfinite(s.center_distance), "spike center distance must be >= 0");
    require(s.inner_radius > 0, "spike inner radius must be > 0");
    require(s.outer_radius > s.inner_radius && std::isfinite(s.outer_radius),
            "spike outer radius must exceed the inner radius");
    for (std::size_t j = 0; j < i; ++j) {
      const auto& o = spikes[j];
      require(std::fabs(s.center_distance - o.center_distance) >= s.outer_radius + o.outer_radius,
              "spike balls overlap");
    }
  }
}

double InitialData::base_radial(double r) const {
  return std::visit(overloaded{
                        [](const base::Zero&) { return 0.0; },
                        [](const base::Constant& b) { return b.c; },
                        [&](const base::Gaussian& b) { return b.A * std::exp(-r * r / (2 * b.sigma * b.sigma)); },
                        [&](const base::BallIndicator& b) { return r <= b.rho ? b.h : 0.0; },
                        [&](const base::RadialTable& b) { return table_value(b.points, r); },
                    },
                    base);
}

LogScalar InitialData::value(const AxisPoint& x) const {
  LogScalar v = LogScalar::from_real(base_radial(x.norm()));
  for (const auto& s : spikes) {
    const double d = x.distance_to_axis_point(s.center_distance);
    if (d < s.outer_radius) v += s.height * LogScalar::from_real(spike_shape(d, s.inner_radius, s.outer_radius));
  }
  return v;
}

std::optional<LogScalar> InitialData::l1_norm() const {
  std::optional<LogScalar> base_mass = std::visit(
      overloaded{
          [](const base::Zero&) -> std::optional<LogScalar> { return LogScalar::zero(); },
          [](const base::Constant& b) -> std::optional<LogScalar> {
            if (b.c == 0) return LogScalar::zero();
            return std::nullopt;
          },
          [&](const base::Gaussian& b) -> std::optional<LogScalar> {
            return LogScalar::from_real(b.A) *
                   LogScalar::from_log(0.5 * n * std::log(2 * std::numbers::pi * b.sigma * b.sigma));
          },
          [&](const base::BallIndicator& b) -> std::optional<LogScalar> {
            return LogScalar::from_real(b.h) * LogScalar::from_log(ln_unit_ball_volume(n) + n * std::log(b.rho));
          },
          [&](const base::RadialTable& b) -> std::optional<LogScalar> {
            std::vector<double> bp;
            for (const auto& p : b.points) bp.push_back(p.first);
            bp = clean_breakpoints(std::move(bp), 0.0, b.points.back().first);
            if (bp.size() < 2) return LogScalar::zero();
            const int dim = n;
            auto ln_f = [&](double s) {
              const double v = table_value(b.points, s);
              if (v <= 0) return -kInf;
              return std::log(v) + (dim - 1) * std::log(s);
            };
            return LogScalar::from_log(ln_unit_sphere_area(n) + integrate_log(ln_f, bp, {1e-13}).ln_value);
          },
      },
      base);
  if (!base_mass) return std::nullopt;
  LogScalar total = *base_mass;
  for (const auto& s : spikes) {
    total += s.height.abs() * LogScalar::from_log(ln_spike_shape_mass(n, s.inner_radius, s.outer_radius));
  }
  return total;
}

LogScalar InitialData::sup_bound() const {
  const double b = std::visit(overloaded{
                                  [](const base::Zero&) { return 0.0; },
                                  [](const base::Constant& c) { return c.c; },
                                  [](const base::Gaussian& g) { return g.A; },
                                  [](const base::BallIndicator& g) { return g.h; },
                                  [](const base::RadialTable& g) {
                                    double m = 0;
                                    for (const auto& p : g.points) m = std::max(m, p.second);
                                    return m;
                                  },
                              },
                              base);
  LogScalar top;
  for (const auto& s : spikes) top = std::max(top, s.height.abs());
  return LogScalar::from_real(b) + top;
}

bool InitialData::nonnegative() const {
  return std::all_of(spikes.begin(), spikes.end(), [](const SpikeSpec& s) { return !s.height.is_negative(); });
}

LogScalar heat_kernel(int n, double distsq, double t) {
  if (!(t > 0)) throw std::domain_error("heat_kernel: t must be > 0");
  if (!(distsq >= 0)) throw std::domain_error("heat_kernel: squared distance must be >= 0");
  return LogScalar::from_log(-0.5 * n * std::log(4 * std::numbers::pi * t) - distsq / (4 * t));
}

double RadialBump::ln_shape(double s) const {
  switch (shape) {
    case Shape::gaussian: return -s * s / (2 * p1 * p1);
    case Shape::plateau_linear: {
      if (s <= p1) return 0.0;
      if (s >= p2) return -kInf;
      return std::log((p2 - s) / (p2 - p1));
    }
    case Shape::table: {
      const double v = table_value(*table, s);
      return v > 0 ? std::log(v) : -kInf;
    }
  }
  return -kInf;
}

double RadialBump::ln_shape(double base, double offset) const {
  if (shape != Shape::plateau_linear) return ln_shape(base + offset);
  if ((base - p1) + offset <= 0) return 0.0;
  const double gap = (p2 - base) - offset;
  if (gap <= 0) return -kInf;
  return std::log(gap / (p2 - p1));
}

double RadialBump::support_end() const {
  switch (shape) {
    case Shape::gaussian: return kInf;
    case Shape::plateau_linear: return std::max(p1, p2);
    case Shape::table: return table->back().first;
  }
  return kInf;
}

double RadialBump::flat_until() const {
  switch (shape) {
    case Shape::gaussian: return 0.0;
    case Shape::plateau_linear: return p1;
    case Shape::table: return table->front().first;
  }
  return 0.0;
}

std::vector<double> RadialBump::kinks() const {
  switch (shape) {
    case Shape::gaussian: return {};
    case Shape::plateau_linear: return {p1, p2};
    case Shape::table: {
      std::vector<double> k;
      for (const auto& p : *table) k.push_back(p.first);
      return k;
    }
  }
  return {};
}

LogScalar bump_l1_norm(int n, const RadialBump& b) {
  if (b.scale.is_zero()) return LogScalar::zero();
  double ln_mass = 0.0;
  switch (b.shape) {
    case RadialBump::Shape::gaussian: ln_mass = 0.5 * n * std::log(2 * std::numbers::pi * b.p1 * b.p1); break;
    case RadialBump::Shape::plateau_linear:
      ln_mass = b.p2 > b.p1 ? ln_spike_shape_mass(n, b.p1, b.p2) : ln_unit_ball_volume(n) + n * std::log(b.p1);
      break;
    case RadialBump::Shape::table: {
      const InitialData d{n, base::RadialTable{*b.table}, {}};
      ln_mass = d.l1_norm()->log_abs();
      break;
    }
  }
  return b.scale.abs() * LogScalar::from_log(ln_mass);
}

LogScalar bump_contribution(int n, const RadialBump& b, const AxisPoint& x, double t, const KernelOptions& opt) {
  if (!(t > 0)) throw std::domain_error("evolution time must be > 0");
  if (b.scale.is_zero()) return LogScalar::zero().with_flag(b.scale.cancelled());
  const double D = x.distance_to_axis_point(b.center);
  const double sq = std::sqrt(t);
  const double edge = b.support_end();
  // Beyond min(D, flat) - 28 sqrt(t) the shape is at its plateau value and the
  // kernel factor is below e^{-196} of its value nearer x.
  const double s_lo = std::max(0.0, std::min(D, b.flat_until()) - kWidths * sq);
  const double s_hi = std::min(edge, D + kWidths * sq);
  if (!(s_hi > s_lo)) return LogScalar::zero();

  double focus, scale;
  if (D < edge) {
    focus = D;
    scale = 2 * sq;
  } else {
    focus = edge;
    scale = std::min(2 * sq, 2 * t / (D - edge));
  }
  // Integrate in w = s - focus: at small t the panels are far narrower than
  // s itself, and absolute nodes would carry rounding noise of order eps s.
  const double lead = D - focus;
  const AngularRule rule = opt.angular;
  auto ln_f = [&](double w) {
    const double g = b.ln_shape(focus, w);
    if (g == -kInf) return -kInf;
    const double s = focus + w;
    const double radial = n == 1 ? 0.0 : (n - 1) * std::log(s);
    // -(lead - w)^2 / 4t with the w-independent part -lead^2 / 4t taken out
    return g + radial + ln_shell_angular_factor(n, D * s / (2 * t), rule) + w * (2 * lead - w) / (4 * t);
  };

  std::vector<double> pts;
  for (double k : b.kinks()) pts.push_back(k - focus);
  add_graded_points(pts, 0.0, scale, s_lo - focus, s_hi - focus);
  const auto bp = clean_breakpoints(std::move(pts), s_lo - focus, s_hi - focus);
  QuadOptions q;
  q.rel_tol = opt.rel_tol;
  q.max_subdivisions = opt.max_subdivisions;
  const auto r = integrate_log(ln_f, bp, q);
  const double ln_pref = -0.5 * n * std::log(4 * std::numbers::pi * t);
  return b.scale * LogScalar::from_log(r.ln_value + ln_pref - lead * lead / (4 * t));
}

SolutionHandle::SolutionHandle(InitialData data, KernelOptions opt) : data_(std::move(data)), opt_(opt) {
  data_.validate();
  std::visit(overloaded{
                 [](const base::Zero&) {},
                 [&](const base::Constant& b) { constant_ = b.c; },
                 [&](const base::Gaussian& b) {
                   RadialBump r;
                   r.shape = RadialBump::Shape::gaussian;
                   r.scale = LogScalar::from_real(b.A);
                   r.p1 = b.sigma;
                   bumps_.push_back(r);
                 },
                 [&](const base::BallIndicator& b) {
                   RadialBump r;
                   r.shape = RadialBump::Shape::plateau_linear;
                   r.scale = LogScalar::from_real(b.h);
                   r.p1 = r.p2 = b.rho;
                   bumps_.push_back(r);
                 },
                 [&](const base::RadialTable& b) {
                   RadialBump r;
                   r.shape = RadialBump::Shape::table;
                   r.scale = LogScalar::one();
                   r.table = std::make_shared<const std::vector<std::pair<double, double>>>(b.points);
                   bumps_.push_back(r);
                 },
             },
             data_.base);
  base_bumps_ = bumps_.size();
  for (const auto& s : data_.spikes) {
    RadialBump r;
    r.center = s.center_distance;
    r.scale = s.height;
    r.shape = RadialBump::Shape::plateau_linear;
    r.p1 = s.inner_radius;
    r.p2 = s.outer_radius;
    bumps_.push_back(r);
  }
}

LogScalar SolutionHandle::base_contribution(const AxisPoint& x, double t) const {
  LogScalar v = LogScalar::from_real(constant_);
  for (std::size_t i = 0; i < base_bumps_; ++i) v += bump_contribution(data_.n, bumps_[i], x, t, opt_);
  return v;
}

LogScalar SolutionHandle::spike_contribution(std::size_t index, const AxisPoint& x, double t) const {
  if (index >= data_.spikes.size()) throw std::out_of_range("spike index out of range");
  return bump_contribution(data_.n, bumps_[base_bumps_ + index], x, t, opt_);
}

LogScalar SolutionHandle::evolve_point(const AxisPoint& x, double t) const {
  if (!(t > 0)) throw std::domain_error("evolve_point: t must be > 0");
  if (data_.n == 1 && x.radial != 0) throw std::invalid_argument("in one dimension points lie on the axis");
  LogScalar v = LogScalar::from_real(constant_);
  for (const auto& b : bumps_) v += bump_contribution(data_.n, b, x, t, opt_);
  return v;
}

LogScalar evolve_point(const SolutionHandle& sol, const AxisPoint& x, double t) { return sol.evolve_point(x, t); }

LogScalar spike_contribution(int n, const SpikeSpec& spike, const AxisPoint& x, double t, const KernelOptions& opt) {
  RadialBump r;
  r.center = spike.center_distance;
  r.scale = spike.height;
  r.p1 = spike.inner_radius;
  r.p2 = spike.outer_radius;
  return bump_contribution(n, r, x, t, opt);
}

LogScalar ball_gaussian_mass(int n, double d, double rho, double t, const KernelOptions& opt) {
  if (!(rho > 0) || !(d >= 0)) throw std::invalid_argument("ball_gaussian_mass: need rho > 0, d >= 0");
  RadialBump r;
  r.scale = LogScalar::one();
  r.p1 = r.p2 = rho;
  return bump_contribution(n, r, AxisPoint{d, 0.0}, t, opt);
}

LogScalar ball_gaussian_mass_radial(int n, double rho, double t, double rel_tol) {
  if (!(rho > 0) || !(t > 0)) throw std::invalid_argument("ball_gaussian_mass_radial: need rho, t > 0");
  const double hi = std::min(rho, kWidths * std::sqrt(t) + std::sqrt(2.0 * n * t));
  auto ln_f = [&](double s) { return (n == 1 ? 0.0 : (n - 1) * std::log(s)) - s * s / (4 * t); };
  std::vector<double> pts;
  add_graded_points(pts, 0.0, std::sqrt(t), 0.0, hi);
  const auto bp = clean_breakpoints(std::move(pts), 0.0, hi);
  const auto q = integrate_log(ln_f, bp, {rel_tol});
  return LogScalar::from_log(ln_unit_sphere_area(n) - 0.5 * n * std::log(4 * std::numbers::pi * t) + q.ln_value);
}

std::optional<LogScalar> linf_envelope(const SolutionHandle& sol, double t) {
  if (!(t > 0)) throw std::domain_error("linf_envelope: t must be > 0");
  const auto m = sol.data().l1_norm();
  if (!m) return std::nullopt;
  return *m * LogScalar::from_log(-0.5 * sol.dimension() * std::log(4 * std::numbers::pi * t));
}

double RadialSnapshot::at(double radius) const {
  if (r.empty()) return 0.0;
  const double dr = r.size() > 1 ? r[1] - r[0] : 1.0;
  const double x = radius / dr;
  const auto k = static_cast<std::size_t>(std::floor(x));
  if (k + 1 < u.size()) {
    const double w = x - static_cast<double>(k);
    return (1 - w) * u[k] + w * u[k + 1];
  }
  if (k + 1 == u.size()) return (1 - (x - static_cast<double>(k))) * u[k];  // to the zero boundary value
  return 0.0;
}

std::vector<RadialSnapshot> radial_fdm_solve(const std::function<double(double)>& profile, const FdmOptions& opt,
                                             std::vector<double> times) {
  const int n = opt.n;
  const double dr = opt.dr;
  require(n >= 1, "dimension must be >= 1");
  require(dr > 0 && opt.r_max > 2 * dr, "need 0 < 2 dr < r_max");
  const double dt_max = std::min(dr * dr / 4, dr * dr / (2.0 * n));
  const double dt = opt.dt > 0 ? opt.dt : dt_max;
  require(dt <= dt_max * (1 + 1e-12), "time step exceeds the explicit stability bound min(dr^2/4, dr^2/(2n))");
  std::sort(times.begin(), times.end());
  for (double T : times) require(T >= 0, "snapshot times must be >= 0");

  const auto N = static_cast<std::size_t>(std::floor(opt.r_max / dr));
  std::vector<double> vol(N), aL(N), aR(N);
  auto face_area = [&](double r) { return n == 1 ? 1.0 : std::pow(r, n - 1); };
  for (std::size_t k = 0; k < N; ++k) {
    const double lo = k == 0 ? 0.0 : (k - 0.5) * dr;
    const double hi = (k + 0.5) * dr;
    vol[k] = (std::pow(hi, n) - std::pow(lo, n)) / n;
    aL[k] = k == 0 ? 0.0 : face_area(lo) / (vol[k] * dr);
    aR[k] = face_area(hi) / (vol[k] * dr);
  }
  const double sigma = std::exp(ln_unit_sphere_area(n));

  // r^{n-1}-weighted cell averages, splitting cells at the profile's kinks.
  using GL = boost::math::quadrature::gauss<double, 10>;
  std::vector<double> u(N), next(N);
  for (std::size_t k = 0; k < N; ++k) {
    const double lo = k == 0 ? 0.0 : (k - 0.5) * dr;
    const double hi = (k + 0.5) * dr;
    std::vector<double> cuts{lo};
    for (double c : opt.kinks) {
      if (c > lo && c < hi) cuts.push_back(c);
    }
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
      acc += GL::integrate([&](double r) { return profile(r) * (n == 1 ? 1.0 : std::pow(r, n - 1)); }, cuts[j],
                           cuts[j + 1]);
    }
    u[k] = acc / vol[k];
  }

  auto mass_of = [&](const std::vector<double>& v) {
    double m = 0;
    for (std::size_t k = 0; k < N; ++k) m += vol[k] * v[k];
    return sigma * m;
  };
  const double mass0 = mass_of(u);
  const double a_out = face_area((N - 0.5) * dr) / dr;

  std::vector<RadialSnapshot> out;
  double t = 0.0;
  double outflow = 0.0;
  for (double T : times) {
    const double span = T - t;
    if (span > 0) {
      const auto steps = static_cast<long>(std::ceil(span / dt - 1e-9));
      const double h = span / static_cast<double>(steps);
      for (long s = 0; s < steps; ++s) {
        next[0] = u[0] + h * aR[0] * (u[1] - u[0]);
        for (std::size_t k = 1; k + 1 < N; ++k) {
          next[k] = u[k] + h * (aR[k] * (u[k + 1] - u[k]) - aL[k] * (u[k] - u[k - 1]));
        }
        next[N - 1] = u[N - 1] + h * (aR[N - 1] * (0.0 - u[N - 1]) - aL[N - 1] * (u[N - 1] - u[N - 2]));
        outflow += h * sigma * a_out * u[N - 1];
        u.swap(next);
      }
      t = T;
    }
    if (std::fabs(outflow) > 1e-6 * std::fabs(mass0) && mass0 != 0) {
      throw std::runtime_error("radial_fdm_solve: mass reached r_max; enlarge the domain");
    }
    RadialSnapshot snap;
    snap.t = T;
    snap.u = u;
    snap.r.resize(N);
    for (std::size_t k = 0; k < N; ++k) snap.r[k] = static_cast<double>(k) * dr;
    snap.mass = mass_of(u);
    snap.boundary_outflow = outflow;
    out.push_back(std::move(snap));
  }
  return out;
}

RadialSnapshot radial_fdm_solve(const std::function<double(double)>& profile, const FdmOptions& opt, double T) {
  return radial_fdm_solve(profile, opt, std::vector<double>{T}).front();
}

}  // namespace heatlab
