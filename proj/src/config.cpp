#include "heatlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace heatlab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool is_identifier(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '.' || c == '-';
  });
}

std::vector<std::string> split(const std::string& s, const std::string& seps) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (seps.find(c) != std::string::npos) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double parse_double(const std::string& raw, const std::string& what) {
  const std::string s = trim(raw);
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0;
  const char* first = s.data() + (!s.empty() && s[0] == '+' ? 1 : 0);
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError(what + ": not a number: '" + s + "'");
  }
  return v;
}

// "h", "e^x" or "-e^x"
LogScalar parse_height(const std::string& raw) {
  std::string s = trim(raw);
  Sign sign = Sign::positive;
  if (s.rfind("-e^", 0) == 0) {
    sign = Sign::negative;
    s = s.substr(1);
  }
  if (s.rfind("e^", 0) == 0) return LogScalar::from_log(parse_double(s.substr(2), "spike height"), sign);
  return LogScalar::from_real(parse_double(s, "spike height"));
}

}  // namespace

bool ConfigSection::has_tag(const std::string& tag) const {
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

std::string ConfigSection::str(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) throw ConfigError("[" + name + "] missing key '" + key + "'");
  return it->second;
}

std::string ConfigSection::str(const std::string& key, const std::string& fallback) const {
  return has(key) ? str(key) : fallback;
}

double ConfigSection::num(const std::string& key) const { return parse_double(str(key), "[" + name + "] " + key); }

double ConfigSection::num(const std::string& key, double fallback) const { return has(key) ? num(key) : fallback; }

long ConfigSection::integer(const std::string& key) const {
  const std::string s = trim(str(key));
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("[" + name + "] " + key + ": not an integer: '" + s + "'");
  }
  return v;
}

long ConfigSection::integer(const std::string& key, long fallback) const { return has(key) ? integer(key) : fallback; }

bool ConfigSection::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string s = trim(str(key));
  if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
  if (s == "false" || s == "no" || s == "0" || s == "off") return false;
  throw ConfigError("[" + name + "] " + key + ": not a boolean: '" + s + "'");
}

std::vector<double> ConfigSection::list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& tok : split(str(key), ", \t")) out.push_back(parse_double(tok, "[" + name + "] " + key));
  return out;
}

std::vector<double> ConfigSection::list(const std::string& key, std::vector<double> fallback) const {
  return has(key) ? list(key) : fallback;
}

std::vector<std::pair<double, double>> ConfigSection::pairs(const std::string& key) const {
  std::vector<std::pair<double, double>> out;
  for (const auto& tok : split(str(key), ", \t")) {
    const auto parts = split(tok, ":");
    if (parts.size() != 2) throw ConfigError("[" + name + "] " + key + ": expected r:v, got '" + tok + "'");
    out.emplace_back(parse_double(parts[0], key), parse_double(parts[1], key));
  }
  return out;
}

const ConfigSection* Config::find(const std::string& name) const {
  for (const auto& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const ConfigSection& Config::at(const std::string& name) const {
  if (const auto* s = find(name)) return *s;
  throw ConfigError("missing section [" + name + "]");
}

Config parse_config(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  auto fail = [&](const std::string& msg) { throw ConfigError("line " + std::to_string(lineno) + ": " + msg); };
  auto current = [&]() -> ConfigSection& {
    if (cfg.sections.empty()) cfg.sections.push_back(ConfigSection{"", {}, {}});
    return cfg.sections.back();
  };
  auto put = [&](const std::string& key, const std::string& value) {
    if (!is_identifier(key)) fail("bad key '" + key + "'");
    if (!current().values.emplace(key, value).second) fail("duplicate key '" + key + "'");
  };
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw.substr(0, raw.find('#'));
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (!is_identifier(name)) fail("bad section name '" + name + "'");
      if (cfg.find(name)) fail("duplicate section [" + name + "]");
      cfg.sections.push_back(ConfigSection{name, {}, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq != std::string::npos && line.find('=', eq + 1) == std::string::npos && is_identifier(trim(line.substr(0, eq)))) {
      const std::string value = trim(line.substr(eq + 1));
      if (value.empty()) fail("empty value");
      put(trim(line.substr(0, eq)), value);
      continue;
    }
    for (const auto& tok : split(line, ", \t")) {
      const auto e = tok.find('=');
      if (e == std::string::npos) {
        if (!is_identifier(tok)) fail("bad token '" + tok + "'");
        current().tags.push_back(tok);
      } else {
        if (e + 1 == tok.size()) fail("empty value for '" + tok.substr(0, e) + "'");
        put(tok.substr(0, e), tok.substr(e + 1));
      }
    }
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

namespace {

template <class Fn>
auto wrap(const ConfigSection& s, Fn fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("[" + s.name + "] " + e.what());
  }
}

CurvatureFunction::Family curvature_family(const ConfigSection& s, const std::string& prefix) {
  const std::string fam = s.str(prefix + "family");
  if (fam == "power") return family::Power{s.num(prefix + "C", 1.0), s.num(prefix + "beta")};
  if (fam == "power_log") {
    return family::PowerLog{s.num(prefix + "C", 1.0), s.num(prefix + "beta"), s.num(prefix + "gamma")};
  }
  if (fam == "constant") return family::Constant{s.num(prefix + "C")};
  if (fam == "table") return family::MonotoneTable{s.pairs(prefix + "points")};
  throw ConfigError("[" + s.name + "] unknown family '" + fam + "'");
}

}  // namespace

GrowthFunction parse_growth(const ConfigSection& s) {
  return wrap(s, [&] {
    if (s.str("family") == "from_curvature") {
      return GrowthFunction::from_curvature(s.num("C", 1.0), CurvatureFunction(curvature_family(s, "k_")));
    }
    return std::visit([](auto f) { return GrowthFunction(GrowthFunction::Family(std::move(f))); },
                      curvature_family(s, ""));
  });
}

CurvatureFunction parse_curvature(const ConfigSection& s) {
  return wrap(s, [&] { return CurvatureFunction(curvature_family(s, "")); });
}

Section3Config parse_section3(const ConfigSection& s) {
  return wrap(s, [&] {
    Section3Config c;
    c.n = static_cast<int>(s.integer("n", 3));
    c.i_max = static_cast<int>(s.integer("i_max", 3));
    c.height_factor = s.num("height_factor", 1.0);
    if (s.has("base")) {
      // base parameters share the section; spikes come from the construction
      ConfigSection b = s;
      b.tags.clear();
      b.values.erase("spikes");
      c.base = parse_initial_data(b).base;
    }
    c.validate();
    return c;
  });
}

InitialData parse_initial_data(const ConfigSection& s) {
  if (s.has_tag("section3")) return wrap(s, [&] { return build_example(parse_section3(s)); });
  return wrap(s, [&] {
    InitialData d;
    d.n = static_cast<int>(s.integer("n", 3));
    const std::string b = s.str("base", "zero");
    if (b == "zero") {
      d.base = base::Zero{};
    } else if (b == "constant") {
      d.base = base::Constant{s.num("c")};
    } else if (b == "gaussian") {
      d.base = base::Gaussian{s.num("A", 1.0), s.num("sigma", 1.0)};
    } else if (b == "ball") {
      d.base = base::BallIndicator{s.num("rho", 1.0), s.num("h", 1.0)};
    } else if (b == "table") {
      d.base = base::RadialTable{s.pairs("points")};
    } else {
      throw ConfigError("[" + s.name + "] unknown base '" + b + "'");
    }
    if (s.has("spikes")) {
      for (const auto& item : split(s.str("spikes"), ";")) {
        if (trim(item).empty()) continue;
        const auto parts = split(trim(item), ":");
        if (parts.size() != 4) throw ConfigError("[" + s.name + "] spike needs d:inner:outer:height, got '" + item + "'");
        d.spikes.push_back({parse_double(parts[0], "spike"), parse_double(parts[1], "spike"),
                            parse_double(parts[2], "spike"), parse_height(parts[3])});
      }
    }
    d.validate();
    return d;
  });
}

ScheduleParams parse_schedule(const ConfigSection& s, const GrowthFunction& L) {
  ScheduleParams p;
  p.R0 = s.num("R0", p.R0);
  p.tau0 = s.num("tau0", p.tau0);
  p.m = s.num("m", p.m);
  p.a = s.num("a", p.a);
  p.max_steps = s.integer("max_steps", p.max_steps);
  p.L = L;
  return p;
}

}  // namespace heatlab
