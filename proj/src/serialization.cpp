#include "uiou/serialization.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace uiou {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eni") == std::string::npos) s += ".0";
  return s;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument(path + ": " + what);
}

const json* find_member(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) fail(path, "must be a JSON object");
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

const json& member(const json& j, const char* key, const std::string& path) {
  const json* v = find_member(j, key, path);
  if (!v) fail(path + "." + key, "is required");
  return *v;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "must be a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "must be an integer");
  return v.get<int>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "must be a string");
  return v.get<std::string>();
}

double number_or(const json& j, const char* key, const std::string& path,
                 double fallback) {
  const json* v = find_member(j, key, path);
  return v ? as_number(*v, path + "." + key) : fallback;
}

int int_or(const json& j, const char* key, const std::string& path, int fallback) {
  const json* v = find_member(j, key, path);
  return v ? as_int(*v, path + "." + key) : fallback;
}

// Re-raise a validator's message under the field's JSON path.
template <typename Fn>
void validate_at(const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

json box_to_json(const Box& b) { return json::array({b.cx, b.cy, b.w, b.h}); }

bool valid_label(const std::string& label) {
  if (label.empty()) return false;
  for (char c : label) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-' ||
                    c == '+';
    if (!ok) return false;
  }
  return true;
}

}  // namespace

json to_json(const RatioSchedule& s) {
  json j;
  j["strategy"] = to_string(s.strategy);
  j["epochs"] = s.total_epochs;
  if (s.strategy == ScheduleStrategy::constant) {
    j["value"] = s.constant_value;
  } else {
    j["start"] = s.start_ratio;
    j["end"] = s.end_ratio;
  }
  return j;
}

RatioSchedule schedule_from_json(const json& j, const std::string& path) {
  RatioSchedule s;
  const std::string name = as_string(member(j, "strategy", path), path + ".strategy");
  validate_at(path + ".strategy",
              [&] { s.strategy = schedule_strategy_from_string(name); });
  if (s.strategy == ScheduleStrategy::constant) {
    s.constant_value = as_number(member(j, "value", path), path + ".value");
    s.total_epochs = int_or(j, "epochs", path, 1000000);
  } else {
    s.start_ratio = number_or(j, "start", path, 2.0);
    s.end_ratio = number_or(j, "end", path, 0.5);
    s.total_epochs = int_or(j, "epochs", path, 300);
  }
  validate_at(path, [&] { validate_schedule(s); });
  return s;
}

json to_json(const LossSpec& spec) {
  json j;
  j["base"] = to_string(spec.base.variant);
  j["alpha"] = spec.base.alpha;
  j["alpha_penalties"] = spec.base.alpha_powers_penalties;
  j["schedule"] = to_json(spec.schedule);
  j["weight"] = to_string(spec.weight);
  j["weight_applies_to"] = to_string(spec.weight_applies_to);
  return j;
}

LossSpec loss_spec_from_json(const json& j, const std::string& path) {
  LossSpec spec;
  const std::string base = as_string(member(j, "base", path), path + ".base");
  validate_at(path + ".base",
              [&] { spec.base.variant = loss_variant_from_string(base); });
  spec.base.alpha = number_or(j, "alpha", path, 1.0);
  if (const json* v = find_member(j, "alpha_penalties", path)) {
    if (!v->is_boolean()) fail(path + ".alpha_penalties", "must be a boolean");
    spec.base.alpha_powers_penalties = v->get<bool>();
  }
  validate_at(path, [&] { validate_loss_kind(spec.base); });
  if (const json* v = find_member(j, "schedule", path)) {
    spec.schedule = schedule_from_json(*v, path + ".schedule");
  }
  if (const json* v = find_member(j, "weight", path)) {
    const std::string name = as_string(*v, path + ".weight");
    validate_at(path + ".weight",
                [&] { spec.weight = weight_mode_from_string(name); });
  }
  if (const json* v = find_member(j, "weight_applies_to", path)) {
    const std::string name = as_string(*v, path + ".weight_applies_to");
    validate_at(path + ".weight_applies_to",
                [&] { spec.weight_applies_to = weight_target_from_string(name); });
  }
  return spec;
}

json to_json(const ScenarioConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["n_gt"] = cfg.n_gt;
  j["anchors_per_gt"] = cfg.anchors_per_gt;
  j["quality_mix"] = cfg.quality_mix;
  j["frame"] = json::array({cfg.frame_width, cfg.frame_height});
  j["confidence_rule"] = to_string(cfg.confidence_rule);
  j["center_jitter"] = cfg.center_jitter;
  j["scale_jitter"] = cfg.scale_jitter;
  return j;
}

ScenarioConfig scenario_config_from_json(const json& j, const std::string& path) {
  ScenarioConfig cfg;
  const json& seed = member(j, "seed", path);
  if (!seed.is_number_integer() ||
      (seed.is_number_integer() && !seed.is_number_unsigned() &&
       seed.get<long long>() < 0)) {
    fail(path + ".seed", "must be a non-negative integer");
  }
  cfg.seed = seed.get<std::uint64_t>();
  cfg.n_gt = as_int(member(j, "n_gt", path), path + ".n_gt");
  cfg.anchors_per_gt =
      as_int(member(j, "anchors_per_gt", path), path + ".anchors_per_gt");
  cfg.quality_mix = as_number(member(j, "quality_mix", path), path + ".quality_mix");
  const json& frame = member(j, "frame", path);
  if (!frame.is_array() || frame.size() != 2) {
    fail(path + ".frame", "must be a [width, height] array");
  }
  cfg.frame_width = as_number(frame[0], path + ".frame[0]");
  cfg.frame_height = as_number(frame[1], path + ".frame[1]");
  if (const json* v = find_member(j, "confidence_rule", path)) {
    const std::string name = as_string(*v, path + ".confidence_rule");
    validate_at(path + ".confidence_rule",
                [&] { cfg.confidence_rule = confidence_rule_from_string(name); });
  }
  cfg.center_jitter = number_or(j, "center_jitter", path, cfg.center_jitter);
  cfg.scale_jitter = number_or(j, "scale_jitter", path, cfg.scale_jitter);
  validate_at(path, [&] { validate_scenario_config(cfg); });
  return cfg;
}

json to_json(const OptimizerConfig& opt) {
  json j;
  j["step_size"] = opt.step_size;
  j["iterations"] = opt.iterations;
  j["iterations_per_epoch"] = opt.iterations_per_epoch;
  return j;
}

OptimizerConfig optimizer_config_from_json(const json& j, const std::string& path) {
  OptimizerConfig opt;
  opt.step_size = as_number(member(j, "step_size", path), path + ".step_size");
  opt.iterations = as_int(member(j, "iterations", path), path + ".iterations");
  opt.iterations_per_epoch = int_or(j, "iterations_per_epoch", path, 1);
  validate_at(path, [&] { validate_optimizer_config(opt); });
  return opt;
}

json to_json(const RunConfig& cfg) {
  json j;
  json runs = json::array();
  for (const RunEntry& run : cfg.runs) {
    json r;
    r["label"] = run.label;
    r["loss_spec"] = to_json(run.loss_spec);
    r["scenario"] = to_json(run.scenario);
    r["optimizer"] = to_json(run.optimizer);
    runs.push_back(std::move(r));
  }
  j["runs"] = std::move(runs);
  j["output_dir"] = cfg.output_dir;
  json formats = json::array();
  if (cfg.write_csv) formats.push_back("csv");
  if (cfg.write_json) formats.push_back("json");
  j["formats"] = std::move(formats);
  return j;
}

RunConfig run_config_from_json(const json& j) {
  const std::string path = "config";
  RunConfig cfg;
  const json& runs = member(j, "runs", path);
  if (!runs.is_array() || runs.empty()) fail("config.runs", "must be a non-empty array");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::string rpath = "runs[" + std::to_string(i) + "]";
    const json& r = runs[i];
    RunEntry entry;
    entry.label = as_string(member(r, "label", rpath), rpath + ".label");
    if (!valid_label(entry.label)) {
      fail(rpath + ".label", "must be non-empty and use only [A-Za-z0-9._+-]");
    }
    if (!seen.insert(entry.label).second) {
      fail(rpath + ".label", "duplicate label \"" + entry.label + "\"");
    }
    entry.loss_spec =
        loss_spec_from_json(member(r, "loss_spec", rpath), rpath + ".loss_spec");
    entry.scenario =
        scenario_config_from_json(member(r, "scenario", rpath), rpath + ".scenario");
    entry.optimizer = optimizer_config_from_json(member(r, "optimizer", rpath),
                                                 rpath + ".optimizer");
    cfg.runs.push_back(std::move(entry));
  }
  cfg.output_dir = as_string(member(j, "output_dir", path), "config.output_dir");
  if (cfg.output_dir.empty()) fail("config.output_dir", "must be non-empty");
  const json& formats = member(j, "formats", path);
  if (!formats.is_array() || formats.empty()) {
    fail("config.formats", "must be a non-empty array");
  }
  cfg.write_csv = false;
  cfg.write_json = false;
  for (std::size_t i = 0; i < formats.size(); ++i) {
    const std::string fpath = "config.formats[" + std::to_string(i) + "]";
    const std::string f = as_string(formats[i], fpath);
    if (f == "csv") {
      cfg.write_csv = true;
    } else if (f == "json") {
      cfg.write_json = true;
    } else {
      fail(fpath, "must be \"csv\" or \"json\"");
    }
  }
  return cfg;
}

RunConfig load_run_config(const std::string& file_path) {
  std::ifstream in(file_path);
  if (!in) {
    throw std::invalid_argument("config file \"" + file_path + "\": cannot be read");
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config file \"" + file_path + "\": " + e.what());
  }
  return run_config_from_json(j);
}

json to_json(const UnifiedValue& value) {
  json j;
  j["iou"] = value.raw_iou;
  j["scaled_iou"] = value.scaled_iou;
  j["loss"] = value.loss;
  j["penalty"] = value.penalty;
  j["ratio"] = value.ratio;
  j["weight"] = value.weight;
  return j;
}

json to_json(const GradCheckReport& report, const LossKind& kind) {
  json j;
  j["kind"] = to_string(kind.variant);
  j["alpha"] = kind.alpha;
  j["trials"] = report.trials;
  j["pass_rate"] = report.pass_rate;
  j["worst_rel_err"] = report.worst_rel_err;
  json failures = json::array();
  for (const GradCheckFailure& f : report.failures) {
    json entry;
    entry["pred"] = box_to_json(f.pred);
    entry["gt"] = box_to_json(f.gt);
    entry["param"] = std::string(1, f.param);
    entry["analytic"] = f.analytic;
    entry["fd"] = f.fd;
    failures.push_back(std::move(entry));
  }
  j["failures"] = std::move(failures);
  return j;
}

json to_json(const RegressionReport& report) {
  json series;
  json iterations = json::array();
  for (std::size_t k = 0; k < report.mean_iou.size(); ++k) {
    iterations.push_back(k);
  }
  series["iteration"] = std::move(iterations);
  series["mean_iou"] = report.mean_iou;
  series["median_iou"] = report.median_iou;
  series["frac_ge_50"] = report.frac_ge_50;
  series["frac_ge_75"] = report.frac_ge_75;
  series["frac_ge_90"] = report.frac_ge_90;
  series["mean_loss"] = report.mean_loss;
  json j;
  j["iterations"] = report.mean_iou.empty() ? 0 : report.mean_iou.size() - 1;
  j["series"] = std::move(series);
  j["ratio_applied"] = report.ratio_applied;
  j["final_ious"] = report.final_ious;
  return j;
}

json to_json(const std::vector<ComparisonRow>& rows) {
  json j = json::array();
  for (const ComparisonRow& row : rows) {
    json r;
    r["label"] = row.label;
    r["cross_frac50"] = row.cross_50;
    r["cross_frac90"] = row.cross_90;
    r["final_mean_iou"] = row.final_mean_iou;
    r["final_frac_ge_90"] = row.final_frac_ge_90;
    j.push_back(std::move(r));
  }
  return j;
}

json to_json(const CurveTable& table) {
  json rows = json::array();
  for (const CurveRow& row : table.rows) {
    json r;
    r["distance"] = row.distance;
    r["ious"] = row.ious;
    rows.push_back(std::move(r));
  }
  json j;
  j["axis"] = to_string(table.axis);
  j["ratios"] = table.ratios;
  j["rows"] = std::move(rows);
  return j;
}

std::string report_csv(const RegressionReport& report) {
  std::string out = "iteration,mean_iou,median_iou,frac_ge_50,frac_ge_75,frac_ge_90,mean_loss\n";
  for (std::size_t k = 0; k < report.mean_iou.size(); ++k) {
    out += std::to_string(k);
    out += ',';
    out += format_double(report.mean_iou[k]);
    out += ',';
    out += format_double(report.median_iou[k]);
    out += ',';
    out += format_double(report.frac_ge_50[k]);
    out += ',';
    out += format_double(report.frac_ge_75[k]);
    out += ',';
    out += format_double(report.frac_ge_90[k]);
    out += ',';
    out += format_double(report.mean_loss[k]);
    out += '\n';
  }
  return out;
}

std::string curve_csv(const CurveTable& table) {
  std::string out = "distance";
  for (double r : table.ratios) {
    out += ",iou_ratio_";
    out += format_double(r);
  }
  out += '\n';
  for (const CurveRow& row : table.rows) {
    out += format_double(row.distance);
    for (double v : row.ious) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::string schedule_csv(const RatioSchedule& s) {
  validate_schedule(s);
  std::string out = "epoch,ratio\n";
  for (int e = 0; e <= s.total_epochs; ++e) {
    out += std::to_string(e);
    out += ',';
    out += format_double(ratio_at(s, e));
    out += '\n';
  }
  return out;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::string out = "label,cross_frac50,cross_frac90,final_mean_iou,final_frac_ge_90\n";
  for (const ComparisonRow& row : rows) {
    out += row.label;
    out += ',';
    out += std::to_string(row.cross_50);
    out += ',';
    out += std::to_string(row.cross_90);
    out += ',';
    out += format_double(row.final_mean_iou);
    out += ',';
    out += format_double(row.final_frac_ge_90);
    out += '\n';
  }
  return out;
}

}  // namespace uiou
