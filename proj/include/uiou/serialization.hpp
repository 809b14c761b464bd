#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "uiou/gradients.hpp"
#include "uiou/schedule.hpp"
#include "uiou/simulator.hpp"
#include "uiou/sweep.hpp"
#include "uiou/unified.hpp"

namespace uiou {

/// Shortest decimal form that round-trips to the same double; locale
/// independent. Integral values keep a trailing ".0" so CSV cells stay
/// recognizably floating point.
std::string format_double(double v);

/// One labeled simulator run of a campaign config.
struct RunEntry {
  std::string label;
  LossSpec loss_spec;
  ScenarioConfig scenario;
  OptimizerConfig optimizer;
};

struct RunConfig {
  std::vector<RunEntry> runs;
  std::string output_dir = "out";
  bool write_csv = true;
  bool write_json = true;
};

nlohmann::json to_json(const LossSpec& spec);
nlohmann::json to_json(const RatioSchedule& s);
nlohmann::json to_json(const ScenarioConfig& cfg);
nlohmann::json to_json(const OptimizerConfig& opt);
nlohmann::json to_json(const RunConfig& cfg);
nlohmann::json to_json(const UnifiedValue& value);
nlohmann::json to_json(const GradCheckReport& report, const LossKind& kind);
nlohmann::json to_json(const RegressionReport& report);
nlohmann::json to_json(const std::vector<ComparisonRow>& rows);
nlohmann::json to_json(const CurveTable& table);

/// Parsers throw std::invalid_argument whose message starts with the JSON
/// path of the offending field ("runs[0].scenario.n_gt: ...").
LossSpec loss_spec_from_json(const nlohmann::json& j,
                             const std::string& path = "loss_spec");
RatioSchedule schedule_from_json(const nlohmann::json& j,
                                 const std::string& path = "schedule");
ScenarioConfig scenario_config_from_json(const nlohmann::json& j,
                                         const std::string& path = "scenario");
OptimizerConfig optimizer_config_from_json(const nlohmann::json& j,
                                           const std::string& path = "optimizer");
RunConfig run_config_from_json(const nlohmann::json& j);

/// Reads and parses a campaign config file. File-access and JSON syntax
/// problems surface as std::invalid_argument naming the file.
RunConfig load_run_config(const std::string& file_path);

/// CSV emitters; fixed column sets, '\n' line ends, no trailing separator.
std::string report_csv(const RegressionReport& report);
std::string curve_csv(const CurveTable& table);
std::string schedule_csv(const RatioSchedule& s);
std::string comparison_csv(const std::vector<ComparisonRow>& rows);

}  // namespace uiou
