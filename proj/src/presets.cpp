#include "uiou/presets.hpp"

#include <stdexcept>

namespace uiou {
namespace {

LossSpec iou_at_constant_ratio(double ratio) {
  LossSpec spec;
  spec.base.variant = LossVariant::iou;
  spec.schedule = constant_schedule(ratio);
  return spec;
}

RunConfig fig4_desk() {
  ScenarioConfig scenario;
  scenario.seed = 7;
  scenario.n_gt = 20;
  scenario.anchors_per_gt = 50;
  scenario.quality_mix = 0.1;
  scenario.frame_width = 100.0;
  scenario.frame_height = 100.0;
  scenario.confidence_rule = ConfidenceRule::constant_half;
  scenario.center_jitter = 1.75;

  OptimizerConfig opt;
  opt.step_size = 0.5;
  opt.iterations = 1400;
  opt.iterations_per_epoch = 1;

  RunConfig cfg;
  cfg.output_dir = "fig4-desk";
  cfg.runs.push_back({"scaling-4", iou_at_constant_ratio(4.0), scenario, opt});
  cfg.runs.push_back({"original", iou_at_constant_ratio(1.0), scenario, opt});
  return cfg;
}

RunConfig ablation_desk() {
  ScenarioConfig scenario;
  scenario.seed = 11;
  scenario.n_gt = 25;
  scenario.anchors_per_gt = 40;
  scenario.quality_mix = 0.3;
  scenario.frame_width = 100.0;
  scenario.frame_height = 100.0;
  scenario.confidence_rule = ConfidenceRule::iou_proxy;

  OptimizerConfig opt;
  opt.step_size = 0.1;
  opt.iterations = 601;
  opt.iterations_per_epoch = 2;  // drives epochs 0..300, the full schedule

  const RatioSchedule annealed{ScheduleStrategy::linear, 2.0, 0.5, 300};

  LossSpec baseline;
  baseline.base.variant = LossVariant::ciou;
  baseline.schedule = constant_schedule(1.0);

  LossSpec focal_box = baseline;
  focal_box.schedule = constant_schedule(0.5);

  LossSpec focal_box_schedule = baseline;
  focal_box_schedule.schedule = annealed;

  LossSpec focal = baseline;
  focal.weight = WeightMode::focal;

  LossSpec focal_inv = baseline;
  focal_inv.weight = WeightMode::focal_inv;

  LossSpec full = baseline;
  full.schedule = annealed;
  full.weight = WeightMode::focal_inv;

  RunConfig cfg;
  cfg.output_dir = "ablation-desk";
  cfg.runs.push_back({"baseline", baseline, scenario, opt});
  cfg.runs.push_back({"focal-box", focal_box, scenario, opt});
  cfg.runs.push_back({"focal-box+schedule", focal_box_schedule, scenario, opt});
  cfg.runs.push_back({"focal", focal, scenario, opt});
  cfg.runs.push_back({"focal-inv", focal_inv, scenario, opt});
  cfg.runs.push_back({"full", full, scenario, opt});
  return cfg;
}

[[noreturn]] void unknown_preset(const std::string& name) {
  std::string valid;
  for (const std::string& p : preset_names()) {
    if (!valid.empty()) valid += ", ";
    valid += p;
  }
  throw std::invalid_argument("unknown preset \"" + name + "\" (valid: " + valid +
                              ")");
}

}  // namespace

std::vector<std::string> preset_names() { return {"fig4-desk", "ablation-desk"}; }

bool is_preset(const std::string& name) {
  for (const std::string& p : preset_names()) {
    if (p == name) return true;
  }
  return false;
}

RunConfig preset_run_config(const std::string& name) {
  if (name == "fig4-desk") return fig4_desk();
  if (name == "ablation-desk") return ablation_desk();
  unknown_preset(name);
}

double preset_stability_bound(const std::string& name) {
  if (name == "fig4-desk") return 0.05;
  if (name == "ablation-desk") return 0.05;
  unknown_preset(name);
}

}  // namespace uiou
