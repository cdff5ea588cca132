#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "heatlab/estimator.hpp"
#include "heatlab/growth.hpp"
#include "heatlab/logscalar.hpp"
#include "heatlab/schedule.hpp"
#include "heatlab/spikes.hpp"

namespace heatlab::io {

using Json = nlohmann::json;

/// 15 significant digits; "inf", "-inf" and "nan" as strings.
Json number(double x);
/// {"sign": -1 | 0 | 1, "ln": ln|x|}, with "cancelled" when set.
Json to_json(const LogScalar& x);
Json to_json(const OsgoodVerdict& v);
Json to_json(const ScheduleResult& r, bool with_rows = false);
Json to_json(const IntegralReport& r);
Json to_json(const EnvelopeReport& r);
Json to_json(const ProbeReport& r);
Json to_json(const ExampleReport& r);

/// A table with a header; fields are quoted when they need it.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  /// Throws std::invalid_argument when the width differs from the header.
  void add_row(std::vector<std::string> row);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

  static std::string field(double x);
  static std::string field(long x);
  static std::string field(const std::string& s);

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

CsvTable schedule_table(const ScheduleResult& r);
/// r, ln value, relative error, L(r) (empty without a comparison)
CsvTable estimate_table(const std::vector<IntegralReport>& reports);
CsvTable probe_table(const ProbeReport& r);
/// i, ln lower bound, ln computed (patch and ball), target exponent
CsvTable spikes_table(const ExampleReport& r);
CsvTable quadratic_table(const ExampleReport& r);

struct PlotSeries {
  std::string csv;
  int x_column = 1;
  int y_column = 2;
  std::string title;
};

/// A gnuplot script plotting each series from its CSV file.
std::string plot_script(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                        const std::vector<PlotSeries>& series);

/// Writes the text; throws std::runtime_error on failure.
void write_file(const std::filesystem::path& path, const std::string& text);
/// Sorted keys, two-space indent, trailing newline.
std::string dump(const Json& j);

}  // namespace heatlab::io
