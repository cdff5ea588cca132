#include "heatlab/cli.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "heatlab/config.hpp"
#include "heatlab/estimator.hpp"
#include "heatlab/io.hpp"
#include "heatlab/logscalar.hpp"
#include "heatlab/quadrature.hpp"

namespace heatlab {

namespace fs = std::filesystem;
using io::CsvTable;
using io::Json;

namespace {

constexpr Subcommand kAll[] = {Subcommand::osgood, Subcommand::schedule, Subcommand::evolve,
                               Subcommand::estimate, Subcommand::example, Subcommand::report};

struct Artifacts {
  Json summary = Json::object();
  std::vector<std::pair<std::string, CsvTable>> tables;
  std::string plot;
  /// Empty when every asserted verdict held.
  std::vector<std::string> failures;
};

void expect(Artifacts& art, bool ok, const std::string& what) {
  if (!ok) art.failures.push_back(what);
}

EstimatorOptions estimator_options(const RunConfig& rc) {
  EstimatorOptions o;
  o.rel_tol = rc.tol;
  o.threads = rc.threads;
  return o;
}

Artifacts run_osgood(const Config& cfg, const RunConfig&) {
  Artifacts art;
  CsvTable inc({"function", "k", "increment"});
  auto increments = [&](const std::string& name, const OsgoodVerdict& v) {
    for (std::size_t k = 0; k < v.increments.size(); ++k) {
      inc.add_row({name, CsvTable::field(static_cast<long>(k)), CsvTable::field(v.increments[k])});
    }
  };
  auto check = [&](const ConfigSection& s, const OsgoodVerdict& v) {
    if (s.has("expect")) expect(art, to_string(v.verdict) == s.str("expect"), "[" + s.name + "] verdict " + to_string(v.verdict));
  };
  bool any = false;
  if (const auto* s = cfg.find("growth")) {
    any = true;
    const auto L = parse_growth(*s);
    const auto v = classify_osgood(L);
    Json j = io::to_json(v);
    j["function"] = L.describe();
    if (L.closed_form()) {
      const auto num = classify_osgood_numeric(L);
      j["numeric"] = io::to_json(num);
      j["numeric_agrees"] = num.verdict == v.verdict;
      increments("L", num);
    } else {
      increments("L", v);
    }
    check(*s, v);
    art.summary["growth"] = j;
    art.summary["verdict"] = to_string(v.verdict);
  }
  if (const auto* s = cfg.find("curvature")) {
    any = true;
    const auto k = parse_curvature(*s);
    const auto v = classify_curvature(k);
    Json j = io::to_json(v);
    j["function"] = k.describe();
    const auto num = classify_curvature_numeric(k);
    j["numeric"] = io::to_json(num);
    j["numeric_agrees"] = num.verdict == v.verdict;
    increments("k", num);
    check(*s, v);
    art.summary["curvature"] = j;
    if (!art.summary.contains("verdict")) art.summary["verdict"] = to_string(v.verdict);
  }
  if (!any) throw ConfigError("osgood needs a [growth] or [curvature] section");
  art.tables.emplace_back("increments.csv", std::move(inc));
  art.plot = io::plot_script("Osgood increments over doublings", "k", "increment", {{"increments.csv", 2, 3, "increment"}});
  return art;
}

Artifacts run_schedule(const Config& cfg, const RunConfig&) {
  Artifacts art;
  const auto& s = cfg.at("schedule");
  const auto L = cfg.has("growth") ? parse_growth(cfg.at("growth")) : GrowthFunction::power(1.0, 2.0);
  const ScheduleParams p = parse_schedule(s, L);
  const auto r = [&] {
    try {
      return build_schedule(p);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("[schedule] ") + e.what());
    }
  }();
  art.summary = io::to_json(r);
  art.summary["L"] = L.describe();
  art.summary["params"] = {{"R0", io::number(p.R0)},
                           {"tau0", io::number(p.tau0)},
                           {"m", io::number(p.m)},
                           {"a", io::number(p.a)},
                           {"max_steps", p.max_steps}};
  art.summary["bound_within_geometric"] = r.telescoped_bound <= r.geometric_bound;
  if (s.has("expect_terminated")) {
    expect(art, r.terminated == s.flag("expect_terminated", false),
           std::string("schedule ") + (r.terminated ? "terminated" : "did not terminate"));
  }
  if (s.has("expect_steps")) {
    expect(art, r.steps_used == s.integer("expect_steps"), "schedule used " + std::to_string(r.steps_used) + " steps");
  }
  art.tables.emplace_back("schedule.csv", io::schedule_table(r));
  art.plot = io::plot_script("Proof schedule", "i", "value",
                             {{"schedule.csv", 1, 4, "tau_i"}, {"schedule.csv", 1, 5, "step_i"}});
  return art;
}

Artifacts run_evolve(const Config& cfg, const RunConfig&) {
  Artifacts art;
  const auto data = parse_initial_data(cfg.at("data"));
  const SolutionHandle sol(data);
  const auto& s = cfg.at("evolve");
  const auto axial = s.list("axial");
  const auto radial = s.list("radial", {0.0});
  const auto times = s.list("times");
  for (double t : times) {
    if (!(t > 0)) throw ConfigError("[evolve] times must be > 0");
  }
  CsvTable samples({"axial", "radial", "t", "sign", "ln_abs"});
  const auto env_ok = data.l1_norm().has_value();
  std::size_t above = 0;
  for (double t : times) {
    for (double z : axial) {
      for (double y : radial) {
        const auto u = sol.evolve_point({z, y}, t);
        samples.add_row({CsvTable::field(z), CsvTable::field(y), CsvTable::field(t),
                         CsvTable::field(static_cast<long>(u.is_zero() ? 0 : (u.is_positive() ? 1 : -1))),
                         CsvTable::field(u.log_abs())});
        if (env_ok && !u.is_zero() && u.log_abs() > linf_envelope(sol, t)->log_abs()) ++above;
      }
    }
  }
  art.summary = {{"n", data.n},
                 {"spikes", data.spikes.size()},
                 {"samples", samples.rows()},
                 {"envelope_violations", env_ok ? Json(above) : Json(nullptr)}};
  if (cfg.has("probe")) {
    const auto& p = cfg.at("probe");
    const auto t = halving_times(p.num("t0", 0.5), static_cast<int>(p.integer("count", 10)));
    const auto probe = small_time_vanishing_probe(sol, p.num("R", 2.0), t);
    art.summary["probe"] = io::to_json(probe);
    if (p.has("expect_vanishing")) {
      expect(art, probe.vanishing == p.flag("expect_vanishing", false), std::string("probe ") + (probe.vanishing ? "vanishing" : "not vanishing"));
    }
    art.tables.emplace_back("probe.csv", io::probe_table(probe));
  }
  art.tables.emplace_back("samples.csv", std::move(samples));
  art.plot = io::plot_script("Solution samples", "axial", "ln|u|", {{"samples.csv", 1, 5, "ln|u|"}});
  return art;
}

Artifacts run_estimate(const Config& cfg, const RunConfig& rc) {
  Artifacts art;
  const SolutionHandle sol(parse_initial_data(cfg.at("data")));
  const auto& s = cfg.at("estimate");
  const double a = s.num("a", 0.0);
  const double p = s.num("p", 2.0);
  const auto radii = s.list("radii");
  const auto opt = estimator_options(rc);
  std::vector<IntegralReport> reps;
  std::optional<GrowthFunction> L;
  if (cfg.has("growth")) {
    L = parse_growth(cfg.at("growth"));
  } else if (s.flag("ceiling", false)) {
    L = GrowthFunction::constant(membership_ceiling(sol, a));
    art.summary["ceiling"] = io::number(L->eval(1.0));
  }
  if (L && p == 2.0) {
    reps = class_membership(sol, a, *L, radii, opt);
  } else {
    for (double r : radii) reps.push_back(spacetime_integral(sol, Region{0.0, r}, p, a, opt));
    if (L) {
      for (auto& r : reps) {
        const double Lr = L->eval(r.region.radius);
        const double margin = Lr - (r.value.log_abs() + std::log1p(r.quadrature_error_estimate));
        r.comparison = Comparison{Lr, margin, margin >= 0};
      }
    }
  }
  Json list = Json::array();
  bool inside = true;
  for (const auto& r : reps) {
    list.push_back(io::to_json(r));
    if (r.comparison) inside = inside && r.comparison->inside;
  }
  art.summary["a"] = io::number(a);
  art.summary["p"] = io::number(p);
  art.summary["reports"] = list;
  if (L) {
    art.summary["L"] = L->describe();
    art.summary["inside"] = inside;
    if (s.flag("assert_inside", false)) expect(art, inside, "membership violated");
  }
  art.tables.emplace_back("estimate.csv", io::estimate_table(reps));
  std::vector<io::PlotSeries> series{{"estimate.csv", 1, 2, "ln value"}};
  if (L) series.push_back({"estimate.csv", 1, 4, "L(r)"});
  art.plot = io::plot_script("Weighted space-time integral", "r", "ln", series);
  return art;
}

Artifacts run_example(const Config& cfg, const RunConfig& rc) {
  Artifacts art;
  const auto& s = cfg.at("example");
  const Section3Config c = parse_section3(s);
  ExampleOptions opt;
  opt.a = s.num("a", opt.a);
  opt.quadratic_grid = s.list("quadratic_grid", opt.quadratic_grid);
  opt.closed_form_i_max = static_cast<int>(s.integer("closed_form_i_max", opt.closed_form_i_max));
  opt.envelope_samples = static_cast<int>(s.integer("envelope_samples", opt.envelope_samples));
  opt.seed = rc.seed;
  opt.estimator = estimator_options(rc);
  if (!(opt.a > c.n / 2.0 - 1)) throw ConfigError("[example] a must exceed n/2 - 1");
  const auto rep = verify_example(c, opt);
  art.summary = io::to_json(rep);
  expect(art, rep.lower_bounds_ok, "computed integrals below the closed-form bound");
  expect(art, rep.envelope_ok, "envelope violated");
  expect(art, rep.membership_ok, "membership violated");
  if (s.flag("assert_violation", true)) expect(art, rep.violation_ok, "quadratic-class violation not detected");
  art.tables.emplace_back("spikes.csv", io::spikes_table(rep));
  art.tables.emplace_back("quadratic.csv", io::quadratic_table(rep));
  art.tables.emplace_back("membership.csv", io::estimate_table(rep.membership));
  art.plot = io::plot_script("Spike integrals", "i", "ln",
                             {{"spikes.csv", 1, 2, "ln lower bound"},
                              {"spikes.csv", 1, 3, "ln computed (patch)"},
                              {"spikes.csv", 1, 4, "ln computed (ball)"}});
  return art;
}

Artifacts dispatch(Subcommand sub, const Config& cfg, const RunConfig& rc);

Artifacts run_report(const Config& cfg, const RunConfig& rc) {
  std::vector<Subcommand> subs;
  const auto* r = cfg.find("report");
  if (r && !r->tags.empty()) {
    for (const auto& t : r->tags) {
      const auto s = parse_subcommand(t);
      if (s == Subcommand::report) throw ConfigError("[report] cannot include report");
      subs.push_back(s);
    }
  } else {
    if (cfg.has("growth") || cfg.has("curvature")) subs.push_back(Subcommand::osgood);
    if (cfg.has("schedule")) subs.push_back(Subcommand::schedule);
    if (cfg.has("evolve")) subs.push_back(Subcommand::evolve);
    if (cfg.has("estimate")) subs.push_back(Subcommand::estimate);
    if (cfg.has("example")) subs.push_back(Subcommand::example);
  }
  if (subs.empty()) throw ConfigError("report found nothing to run");
  Artifacts art;
  for (auto sub : subs) {
    Artifacts part = dispatch(sub, cfg, rc);
    const std::string name = to_string(sub);
    art.summary[name] = part.summary;
    for (auto& [file, table] : part.tables) art.tables.emplace_back(name + "_" + file, std::move(table));
    for (const auto& f : part.failures) art.failures.push_back(name + ": " + f);
  }
  art.plot = "# one plot per section; see the CSV tables alongside\n";
  for (const auto& [file, table] : art.tables) art.plot += "# " + file + "\n";
  return art;
}

Artifacts dispatch(Subcommand sub, const Config& cfg, const RunConfig& rc) {
  switch (sub) {
    case Subcommand::osgood: return run_osgood(cfg, rc);
    case Subcommand::schedule: return run_schedule(cfg, rc);
    case Subcommand::evolve: return run_evolve(cfg, rc);
    case Subcommand::estimate: return run_estimate(cfg, rc);
    case Subcommand::example: return run_example(cfg, rc);
    case Subcommand::report: return run_report(cfg, rc);
  }
  throw std::logic_error("unreachable");
}

}  // namespace

std::string to_string(Subcommand s) {
  switch (s) {
    case Subcommand::osgood: return "osgood";
    case Subcommand::schedule: return "schedule";
    case Subcommand::evolve: return "evolve";
    case Subcommand::estimate: return "estimate";
    case Subcommand::example: return "example";
    case Subcommand::report: return "report";
  }
  return "?";
}

Subcommand parse_subcommand(const std::string& name) {
  for (auto s : kAll) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown subcommand '" + name + "'");
}

RunOutcome run(const RunConfig& rc) {
  if (rc.threads < 1) return {exit_usage, "threads must be >= 1"};
  if (!(rc.tol > 0 && rc.tol < 1)) return {exit_usage, "tol must lie in (0, 1)"};
  Config cfg;
  try {
    cfg = load_config(rc.config_path.string());
  } catch (const ConfigError& e) {
    return {exit_usage, e.what()};
  }
  std::error_code ec;
  fs::create_directories(rc.out_dir, ec);
  if (ec || !fs::is_directory(rc.out_dir)) return {exit_usage, "cannot create output directory '" + rc.out_dir.string() + "'"};

  Artifacts art;
  try {
    art = dispatch(rc.subcommand, cfg, rc);
  } catch (const ConfigError& e) {
    return {exit_usage, e.what()};
  } catch (const std::logic_error& e) {
    return {exit_usage, e.what()};
  } catch (const std::exception& e) {
    return {exit_verdict, std::string("numerical failure: ") + e.what()};
  }

  Json out = art.summary;
  out["subcommand"] = to_string(rc.subcommand);
  out["seed"] = rc.seed;
  out["tol"] = io::number(rc.tol);
  out["failures"] = art.failures;
  out["ok"] = art.failures.empty();
  try {
    io::write_file(rc.out_dir / "results.json", io::dump(out));
    for (const auto& [file, table] : art.tables) io::write_file(rc.out_dir / file, table.str());
    io::write_file(rc.out_dir / "plot.gp", art.plot);
  } catch (const std::exception& e) {
    return {exit_usage, e.what()};
  }
  if (!art.failures.empty()) {
    std::string msg;
    for (const auto& f : art.failures) msg += (msg.empty() ? "" : "; ") + f;
    return {exit_verdict, msg};
  }
  return {};
}

}  // namespace heatlab
