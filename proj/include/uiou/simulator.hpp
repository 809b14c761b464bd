#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "uiou/exec.hpp"
#include "uiou/geometry.hpp"
#include "uiou/unified.hpp"

namespace uiou {

/// How anchor confidences are synthesized. constant_half pins every anchor
/// at 0.5 and isolates the geometric effects; iou_proxy ties confidence to
/// the anchor's current IoU, clamped to [0.01, 0.99] and refreshed every
/// iteration.
enum class ConfidenceRule { constant_half, iou_proxy };

struct ScenarioConfig {
  std::uint64_t seed = 0;
  int n_gt = 1;
  int anchors_per_gt = 1;
  double quality_mix = 0.5;  // fraction of anchors starting at IoU >= 0.5
  double frame_width = 100.0;
  double frame_height = 100.0;
  ConfidenceRule confidence_rule = ConfidenceRule::constant_half;
  // Anchor jitter half-ranges. Centers move uniformly within
  // +-center_jitter * GT dimension per axis; dimensions scale by
  // exp(U(-scale_jitter, scale_jitter)) per axis. The defaults keep every
  // anchor overlapping its GT; center_jitter above ~1 admits disjoint
  // anchors, the population where plain IoU gradients vanish.
  double center_jitter = 0.5;
  double scale_jitter = 0.6931471805599453;  // ln 2
};

struct Anchor {
  Box box;
  double confidence = 0.5;
  int gt = 0;  // index into Scenario::gts
};

struct Scenario {
  ScenarioConfig config;
  std::vector<Box> gts;
  std::vector<Anchor> anchors;
};

struct OptimizerConfig {
  double step_size = 0.01;
  int iterations = 100;
  int iterations_per_epoch = 1;  // epoch = iteration / iterations_per_epoch
};

/// Per-record metric series, each of length iterations + 1: entry 0 is the
/// initial population, entry k the state after k gradient steps. Metrics are
/// always measured on the unscaled pair; scaling exists only inside the loss,
/// so mean_loss is the unweighted base loss at ratio 1. ratio_applied[k] for
/// k >= 1 is the ratio the k-th step actually used (entry 0 repeats the
/// epoch-0 ratio).
struct RegressionReport {
  std::vector<double> mean_iou;
  std::vector<double> median_iou;
  std::vector<double> frac_ge_50;
  std::vector<double> frac_ge_75;
  std::vector<double> frac_ge_90;
  std::vector<double> mean_loss;
  std::vector<double> ratio_applied;
  std::vector<double> final_ious;  // one per anchor, final state
};

struct ComparisonRow {
  std::string label;
  int cross_50 = -1;  // first record index with frac_ge_50 >= 0.5, -1 if never
  int cross_90 = -1;  // first record index with frac_ge_90 >= 0.5, -1 if never
  double final_mean_iou = 0.0;
  double final_frac_ge_90 = 0.0;
};

/// Anchor generation could not hit the requested quality band within the
/// resampling budget.
class generation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A non-finite loss or gradient surfaced during descent.
class numerical_error : public std::runtime_error {
 public:
  numerical_error(const std::string& msg, int iteration_, int anchor_)
      : std::runtime_error(msg), iteration(iteration_), anchor(anchor_) {}
  int iteration;
  int anchor;
};

/// Throws std::invalid_argument with a field-level message on bad values.
void validate_scenario_config(const ScenarioConfig& cfg);
void validate_optimizer_config(const OptimizerConfig& opt);

/// Deterministic for a fixed seed. Each anchor is a jittered copy of its GT
/// (center offset within center_jitter GT dimensions, log-scale size jitter
/// within scale_jitter), resampled until it lands in its quality band: the
/// first round(quality_mix * total) anchors start at IoU >= 0.5, the rest
/// below 0.2.
Scenario generate_scenario(const ScenarioConfig& cfg);

/// Plain gradient descent of every anchor onto its GT under the given loss.
/// Epochs advance as iteration / iterations_per_epoch; widths and heights are
/// clamped to 1e-6 after each step. The two exec modes produce bitwise
/// identical reports. Throws numerical_error on a non-finite loss or
/// gradient, std::invalid_argument when the iteration budget would step past
/// the schedule's final epoch.
RegressionReport run_regression(const Scenario& scenario, const LossSpec& spec,
                                const OptimizerConfig& opt,
                                ExecMode mode = ExecMode::parallel);

/// Crossing iterations and final metrics per labeled report. Throws
/// std::invalid_argument on an empty list or mismatched series lengths.
std::vector<ComparisonRow> compare_runs(
    const std::vector<std::pair<std::string, RegressionReport>>& reports);

std::string to_string(ConfidenceRule r);
ConfidenceRule confidence_rule_from_string(const std::string& name);

}  // namespace uiou
