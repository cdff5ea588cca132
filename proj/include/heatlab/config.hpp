#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "heatlab/growth.hpp"
#include "heatlab/kernel.hpp"
#include "heatlab/schedule.hpp"
#include "heatlab/spikes.hpp"

namespace heatlab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One [section] of a key-value config. Keys are case-sensitive; bare words
/// (such as "section3") are kept as tags.
class ConfigSection {
 public:
  std::string name;
  std::map<std::string, std::string> values;
  std::vector<std::string> tags;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  bool has_tag(const std::string& tag) const;
  std::string str(const std::string& key) const;
  std::string str(const std::string& key, const std::string& fallback) const;
  double num(const std::string& key) const;
  double num(const std::string& key, double fallback) const;
  long integer(const std::string& key) const;
  long integer(const std::string& key, long fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  /// Comma or whitespace separated numbers.
  std::vector<double> list(const std::string& key) const;
  std::vector<double> list(const std::string& key, std::vector<double> fallback) const;
  /// "r:v, r:v, ..." pairs.
  std::vector<std::pair<double, double>> pairs(const std::string& key) const;
};

/// Sections in file order. Lines are "key = value", or several
/// "key=value" tokens and bare tags separated by spaces or commas.
/// '#' starts a comment.
class Config {
 public:
  std::vector<ConfigSection> sections;

  const ConfigSection* find(const std::string& name) const;
  const ConfigSection& at(const std::string& name) const;
  bool has(const std::string& name) const { return find(name) != nullptr; }
};

/// Throws ConfigError with the line number on malformed input.
Config parse_config(const std::string& text);
Config load_config(const std::string& path);

/// family = power | power_log | constant | table | from_curvature, with C,
/// beta, gamma, points; from_curvature reads k_family, k_C, k_beta, k_gamma.
GrowthFunction parse_growth(const ConfigSection& s);
CurvatureFunction parse_curvature(const ConfigSection& s);

/// n, base = zero | constant | gaussian | ball | table with its parameters,
/// and spikes = "d:inner:outer:height; ...", or the tag section3 with n,
/// i_max and height_factor.
InitialData parse_initial_data(const ConfigSection& s);
Section3Config parse_section3(const ConfigSection& s);

/// R0, tau0, m, a, max_steps; L from the growth section.
ScheduleParams parse_schedule(const ConfigSection& s, const GrowthFunction& L);

}  // namespace heatlab
