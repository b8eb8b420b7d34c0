#pragma once

// Run reports (versioned JSON, floats with 17 significant digits) and
// deterministic SVG line plots.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace mfop {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchema = 1;

struct Metric {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  std::string relation;  ///< one of "<=", "<", ">=", ">", "=="
  bool pass = false;
};

/// value `relation` bound; NaN never passes.
bool compare(double value, const std::string& relation, double bound);

struct RunReport {
  std::string command;
  Json params = Json::object();
  std::vector<Metric> metrics;
  std::vector<std::string> artifacts;
  Json data = Json::object();
  std::uint64_t seed = 0;
  double wall_time = 0.0;
  bool failed = false;  ///< the experiment itself raised
  std::string error_type;
  std::string error_message;

  const Metric& add_metric(std::string name, double value, const std::string& relation, double bound);
  /// Pass/fail flag recorded as value 1/0 against bound 1.
  const Metric& add_check(std::string name, bool ok);
  void fail(std::string type, std::string message);

  /// Logical AND of all pass flags, false after fail().
  bool all_pass() const;
  Json to_json() const;
};

/// JSON text with doubles printed by %.17g and non-finite doubles as null.
std::string dump_json(const Json& j, int indent = 2);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool markers = true;
  int width = 640;
  int height = 400;
};

/// Standalone SVG text. Throws std::invalid_argument on an empty series list or mismatched lengths.
std::string render_svg(const std::vector<Series>& series, const PlotOptions& opt = {});
/// Writes render_svg() to `path`; throws std::runtime_error on IO failure.
void emit_plot(const std::vector<Series>& series, const std::string& path, const PlotOptions& opt = {});

}  // namespace mfop
