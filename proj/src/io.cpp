#include "heatlab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace heatlab::io {

namespace {

std::string g15(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

int sign_of(const LogScalar& x) { return x.is_zero() ? 0 : (x.is_positive() ? 1 : -1); }

Json region(const Region& r) { return {{"center", number(r.center)}, {"radius", number(r.radius)}}; }

}  // namespace

Json number(double x) {
  if (!std::isfinite(x)) return g15(x);
  return std::stod(g15(x));
}

Json to_json(const LogScalar& x) {
  Json j{{"sign", sign_of(x)}, {"ln", number(x.log_abs())}};
  if (x.cancelled()) j["cancelled"] = true;
  return j;
}

Json to_json(const OsgoodVerdict& v) {
  Json inc = Json::array();
  for (double d : v.increments) inc.push_back(number(d));
  return {{"verdict", to_string(v.verdict)},
          {"method", to_string(v.method)},
          {"partial_integral", number(v.partial_integral)},
          {"probe_radius", number(v.probe_radius)},
          {"increments", inc}};
}

Json to_json(const ScheduleResult& r, bool with_rows) {
  Json j{{"terminated", r.terminated},
         {"steps_used", r.steps_used},
         {"rows", r.rows.size()},
         {"step_sum", number(r.step_sum)},
         {"telescoped_bound", to_json(r.telescoped_bound)},
         {"geometric_bound", to_json(r.geometric_bound)}};
  if (with_rows) {
    Json rows = Json::array();
    for (const auto& row : r.rows) {
      rows.push_back({{"i", row.i},
                      {"ln_R", number(row.ln_R)},
                      {"tau", number(row.tau)},
                      {"step", number(row.step)},
                      {"bound_term", to_json(row.bound_term)}});
    }
    j["table"] = rows;
  }
  return j;
}

Json to_json(const IntegralReport& r) {
  Json j{{"region", region(r.region)},
         {"p", number(r.p)},
         {"a", number(r.a)},
         {"value", to_json(r.value)},
         {"norm", to_json(r.norm)},
         {"quadrature_error_estimate", number(r.quadrature_error_estimate)},
         {"t_floor", number(r.t_floor)},
         {"tail_bound", to_json(r.tail_bound)},
         {"time_evaluations", r.time_evaluations},
         {"cancelled", r.cancelled}};
  if (r.comparison) {
    j["comparison"] = {{"L", number(r.comparison->L_value)},
                       {"margin", number(r.comparison->margin)},
                       {"inside", r.comparison->inside}};
  }
  return j;
}

Json to_json(const EnvelopeReport& r) {
  Json v = Json::array();
  for (const auto& x : r.violations) {
    v.push_back({{"axial", number(x.sample.x.axial)},
                 {"radial", number(x.sample.x.radial)},
                 {"t", number(x.sample.t)},
                 {"value", to_json(x.value)},
                 {"envelope", to_json(x.envelope)},
                 {"margin", number(x.margin)}});
  }
  return {{"checked", r.checked}, {"violations", v}, {"worst_margin", number(r.worst_margin)}};
}

Json to_json(const ProbeReport& r) {
  Json s = Json::array();
  for (const auto& x : r.samples) s.push_back({{"t", number(x.t)}, {"value", to_json(x.value)}});
  return {{"vanishing", r.vanishing}, {"verdict", r.vanishing ? "consistent with vanishing" : "not vanishing"},
          {"samples", s}};
}

Json to_json(const ExampleReport& r) {
  Json spikes = Json::array();
  for (const auto& s : r.spikes) {
    spikes.push_back({{"i", s.i},
                      {"center", number(s.center)},
                      {"ln_r", number(s.radii.ln_r)},
                      {"ln_rtilde", number(s.radii.ln_rtilde)},
                      {"bound_exact", to_json(s.bound.exact)},
                      {"bound_floor", to_json(s.bound.floor)},
                      {"ln_C", number(s.bound.ln_C)},
                      {"q", number(s.bound.q)},
                      {"target_exponent", number(s.bound.target_exponent)},
                      {"patch", to_json(s.patch)},
                      {"ball", to_json(s.ball)},
                      {"patch_ok", s.patch_ok},
                      {"ball_ok", s.ball_ok}});
  }
  Json membership = Json::array();
  for (const auto& m : r.membership) membership.push_back(to_json(m));
  Json quad = Json::array();
  for (const auto& q : r.quadratic) quad.push_back({{"C", number(q.C)}, {"i_star", q.i_star}, {"detected", q.detected}, {"ok", q.ok}});
  return {{"n", r.config.n},
          {"i_max", r.config.i_max},
          {"height_factor", number(r.config.height_factor)},
          {"a", number(r.a)},
          {"spikes", spikes},
          {"envelope", to_json(r.envelope)},
          {"ceiling", number(r.ceiling)},
          {"membership", membership},
          {"quadratic", quad},
          {"checks",
           {{"lower_bounds", r.lower_bounds_ok},
            {"envelope", r.envelope_ok},
            {"membership", r.membership_ok},
            {"quadratic_violation", r.violation_ok}}},
          {"passed", r.passed()},
          {"notes", r.notes}};
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw std::invalid_argument("csv row width differs from the header");
  rows_.push_back(std::move(row));
}

std::string CsvTable::field(double x) { return g15(x); }
std::string CsvTable::field(long x) { return std::to_string(x); }
std::string CsvTable::field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out += ',';
      out += field(cells[k]);
    }
    out += "\r\n";
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

CsvTable schedule_table(const ScheduleResult& r) {
  CsvTable t({"i", "R_i", "ln_R_i", "tau_i", "step_i", "ln_bound_term"});
  for (const auto& row : r.rows) {
    t.add_row({CsvTable::field(row.i), CsvTable::field(row.R()), CsvTable::field(row.ln_R), CsvTable::field(row.tau),
               CsvTable::field(row.step), CsvTable::field(row.bound_term.log_abs())});
  }
  return t;
}

CsvTable estimate_table(const std::vector<IntegralReport>& reports) {
  CsvTable t({"r", "ln_value", "rel_error", "L_r", "inside"});
  for (const auto& r : reports) {
    const bool cmp = r.comparison.has_value();
    t.add_row({CsvTable::field(r.region.radius), CsvTable::field(r.value.log_abs()),
               CsvTable::field(r.quadrature_error_estimate), cmp ? CsvTable::field(r.comparison->L_value) : "",
               cmp ? (r.comparison->inside ? "true" : "false") : ""});
  }
  return t;
}

CsvTable probe_table(const ProbeReport& r) {
  CsvTable t({"t", "sign", "ln_value"});
  for (const auto& s : r.samples) {
    t.add_row({CsvTable::field(s.t), CsvTable::field(static_cast<long>(sign_of(s.value))),
               CsvTable::field(s.value.log_abs())});
  }
  return t;
}

CsvTable spikes_table(const ExampleReport& r) {
  CsvTable t({"i", "ln_lower_bound", "ln_computed_patch", "ln_computed_ball", "target_exponent"});
  for (const auto& s : r.spikes) {
    t.add_row({CsvTable::field(static_cast<long>(s.i)), CsvTable::field(s.bound.exact.log_abs()),
               CsvTable::field(s.patch.value.log_abs()), CsvTable::field(s.ball.value.log_abs()),
               CsvTable::field(s.bound.target_exponent)});
  }
  return t;
}

CsvTable quadratic_table(const ExampleReport& r) {
  CsvTable t({"C", "i_star", "detected", "ok"});
  for (const auto& q : r.quadratic) {
    std::string det;
    for (int i : q.detected) det += (det.empty() ? "" : " ") + std::to_string(i);
    t.add_row({CsvTable::field(q.C), CsvTable::field(static_cast<long>(q.i_star)), det, q.ok ? "true" : "false"});
  }
  return t;
}

std::string plot_script(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                        const std::vector<PlotSeries>& series) {
  std::string s = "set datafile separator ','\n";
  s += "set key autotitle columnhead\n";
  s += "set title '" + title + "'\n";
  s += "set xlabel '" + xlabel + "'\n";
  s += "set ylabel '" + ylabel + "'\n";
  s += "set grid\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& p = series[k];
    s += (k == 0 ? "plot " : "     ");
    s += "'" + p.csv + "' using " + std::to_string(p.x_column) + ":" + std::to_string(p.y_column) +
         " with linespoints title '" + p.title + "'";
    s += (k + 1 < series.size() ? ", \\\n" : "\n");
  }
  s += "pause -1\n";
  return s;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace heatlab::io
