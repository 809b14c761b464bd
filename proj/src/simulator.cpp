#include "uiou/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>

#include "uiou/gradients.hpp"
#include "uiou/losses.hpp"
#include "uiou/schedule.hpp"

namespace uiou {
namespace {

constexpr double kMinDimension = 1.0e-6;
constexpr int kMaxBandAttempts = 10000;

double anchor_confidence(const ScenarioConfig& cfg, double current_iou) {
  switch (cfg.confidence_rule) {
    case ConfidenceRule::constant_half:
      return 0.5;
    case ConfidenceRule::iou_proxy:
      return std::clamp(current_iou, 0.01, 0.99);
  }
  return 0.5;
}

bool in_band(double v, bool high) { return high ? v >= 0.5 : v < 0.2; }

struct MetricScratch {
  std::vector<double> ious;
  std::vector<double> losses;
  std::vector<double> sorted;
};

// Serial reduction over per-anchor values; record order is fixed so serial
// and parallel runs emit identical series.
void record_metrics(const std::vector<Box>& boxes, const Scenario& scenario,
                    const LossKind& base, int after_iteration,
                    RegressionReport& report, MetricScratch& scratch) {
  const std::size_t n = boxes.size();
  scratch.ious.resize(n);
  scratch.losses.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    const Box& gt = scenario.gts[static_cast<std::size_t>(scenario.anchors[a].gt)];
    scratch.ious[a] = iou(boxes[a], gt);
    scratch.losses[a] = geometric_loss(base, boxes[a], gt).loss;
    if (!std::isfinite(scratch.losses[a])) {
      const std::string when = after_iteration < 0
                                   ? std::string("in the initial population")
                                   : "after iteration " + std::to_string(after_iteration);
      throw numerical_error("simulator: non-finite loss " + when + " at anchor " +
                                std::to_string(a),
                            after_iteration, static_cast<int>(a));
    }
  }
  double iou_sum = 0.0;
  double loss_sum = 0.0;
  int ge50 = 0;
  int ge75 = 0;
  int ge90 = 0;
  for (std::size_t a = 0; a < n; ++a) {
    iou_sum += scratch.ious[a];
    loss_sum += scratch.losses[a];
    if (scratch.ious[a] >= 0.5) ++ge50;
    if (scratch.ious[a] >= 0.75) ++ge75;
    if (scratch.ious[a] >= 0.9) ++ge90;
  }
  scratch.sorted = scratch.ious;
  std::sort(scratch.sorted.begin(), scratch.sorted.end());
  const double median =
      n % 2 == 1 ? scratch.sorted[n / 2]
                 : 0.5 * (scratch.sorted[n / 2 - 1] + scratch.sorted[n / 2]);
  const double dn = static_cast<double>(n);
  report.mean_iou.push_back(iou_sum / dn);
  report.median_iou.push_back(median);
  report.frac_ge_50.push_back(ge50 / dn);
  report.frac_ge_75.push_back(ge75 / dn);
  report.frac_ge_90.push_back(ge90 / dn);
  report.mean_loss.push_back(loss_sum / dn);
}

}  // namespace

void validate_scenario_config(const ScenarioConfig& cfg) {
  if (cfg.n_gt <= 0) throw std::invalid_argument("scenario: n_gt must be > 0");
  if (cfg.anchors_per_gt <= 0) {
    throw std::invalid_argument("scenario: anchors_per_gt must be > 0");
  }
  if (!(cfg.quality_mix >= 0.0 && cfg.quality_mix <= 1.0)) {
    throw std::invalid_argument("scenario: quality_mix must lie in [0, 1]");
  }
  if (!std::isfinite(cfg.frame_width) || cfg.frame_width <= 0.0 ||
      !std::isfinite(cfg.frame_height) || cfg.frame_height <= 0.0) {
    throw std::invalid_argument("scenario: frame dimensions must be finite and > 0");
  }
  if (!std::isfinite(cfg.center_jitter) || cfg.center_jitter < 0.0) {
    throw std::invalid_argument("scenario: center_jitter must be finite and >= 0");
  }
  if (!std::isfinite(cfg.scale_jitter) || cfg.scale_jitter < 0.0) {
    throw std::invalid_argument("scenario: scale_jitter must be finite and >= 0");
  }
}

void validate_optimizer_config(const OptimizerConfig& opt) {
  if (!std::isfinite(opt.step_size) || opt.step_size <= 0.0) {
    throw std::invalid_argument("optimizer: step_size must be finite and > 0");
  }
  if (opt.iterations <= 0) {
    throw std::invalid_argument("optimizer: iterations must be > 0");
  }
  if (opt.iterations_per_epoch <= 0) {
    throw std::invalid_argument("optimizer: iterations_per_epoch must be > 0");
  }
}

Scenario generate_scenario(const ScenarioConfig& cfg) {
  validate_scenario_config(cfg);
  Scenario scenario;
  scenario.config = cfg;

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  scenario.gts.reserve(static_cast<std::size_t>(cfg.n_gt));
  for (int g = 0; g < cfg.n_gt; ++g) {
    const double w = (0.06 + 0.12 * unit(rng)) * cfg.frame_width;
    const double h = (0.06 + 0.12 * unit(rng)) * cfg.frame_height;
    const double cx = 0.5 * w + (cfg.frame_width - w) * unit(rng);
    const double cy = 0.5 * h + (cfg.frame_height - h) * unit(rng);
    scenario.gts.push_back(Box{cx, cy, w, h});
  }

  const long long total =
      static_cast<long long>(cfg.n_gt) * cfg.anchors_per_gt;
  const long long n_high = std::llround(cfg.quality_mix * static_cast<double>(total));
  std::uniform_real_distribution<double> logs(-cfg.scale_jitter, cfg.scale_jitter);
  std::uniform_real_distribution<double> sym(-cfg.center_jitter, cfg.center_jitter);

  scenario.anchors.reserve(static_cast<std::size_t>(total));
  for (long long a = 0; a < total; ++a) {
    const int g = static_cast<int>(a / cfg.anchors_per_gt);
    const Box& gt = scenario.gts[static_cast<std::size_t>(g)];
    const bool high = a < n_high;
    Anchor anchor;
    anchor.gt = g;
    bool placed = false;
    for (int attempt = 0; attempt < kMaxBandAttempts; ++attempt) {
      const Box candidate{gt.cx + sym(rng) * gt.w, gt.cy + sym(rng) * gt.h,
                          gt.w * std::exp(logs(rng)), gt.h * std::exp(logs(rng))};
      if (in_band(iou(candidate, gt), high)) {
        anchor.box = candidate;
        placed = true;
        break;
      }
    }
    if (!placed) {
      throw generation_error("scenario: anchor " + std::to_string(a) +
                             " could not reach its quality band (IoU " +
                             (high ? ">= 0.5" : "< 0.2") + ") within " +
                             std::to_string(kMaxBandAttempts) + " attempts");
    }
    anchor.confidence = anchor_confidence(cfg, iou(anchor.box, gt));
    scenario.anchors.push_back(anchor);
  }
  return scenario;
}

RegressionReport run_regression(const Scenario& scenario, const LossSpec& spec,
                                const OptimizerConfig& opt, ExecMode mode) {
  validate_optimizer_config(opt);
  validate_loss_kind(spec.base);
  validate_schedule(spec.schedule);
  if (scenario.anchors.empty()) {
    throw std::invalid_argument("simulator: scenario has no anchors");
  }

  const int last_epoch = (opt.iterations - 1) / opt.iterations_per_epoch;
  if (last_epoch > spec.schedule.total_epochs) {
    throw std::invalid_argument(
        "optimizer: iteration budget runs to epoch " + std::to_string(last_epoch) +
        " but the schedule ends at epoch " + std::to_string(spec.schedule.total_epochs));
  }

  const std::size_t n = scenario.anchors.size();
  std::vector<Box> boxes(n);
  for (std::size_t a = 0; a < n; ++a) boxes[a] = scenario.anchors[a].box;

  RegressionReport report;
  const std::size_t records = static_cast<std::size_t>(opt.iterations) + 1;
  report.mean_iou.reserve(records);
  report.median_iou.reserve(records);
  report.frac_ge_50.reserve(records);
  report.frac_ge_75.reserve(records);
  report.frac_ge_90.reserve(records);
  report.mean_loss.reserve(records);
  report.ratio_applied.reserve(records);

  MetricScratch scratch;
  record_metrics(boxes, scenario, spec.base, -1, report, scratch);
  report.ratio_applied.push_back(ratio_at(spec.schedule, 0));

  std::vector<Box> next(n);
  std::vector<signed char> bad(n);
  std::vector<std::exception_ptr> errors(n);
  const bool parallel = mode == ExecMode::parallel;
  const auto count = static_cast<long long>(n);

  for (int iter = 0; iter < opt.iterations; ++iter) {
    const int epoch = iter / opt.iterations_per_epoch;
#pragma omp parallel for schedule(static) if (parallel)
    for (long long a = 0; a < count; ++a) {
      const auto idx = static_cast<std::size_t>(a);
      bad[idx] = 0;
      errors[idx] = nullptr;
      try {
        const Anchor& anchor = scenario.anchors[idx];
        const Box& gt = scenario.gts[static_cast<std::size_t>(anchor.gt)];
        const double conf =
            scenario.config.confidence_rule == ConfidenceRule::iou_proxy
                ? anchor_confidence(scenario.config, iou(boxes[idx], gt))
                : anchor.confidence;
        const BoxGrad g =
            analytic_grad(spec, Prediction{boxes[idx], conf}, gt, epoch);
        if (!std::isfinite(g.d_cx) || !std::isfinite(g.d_cy) ||
            !std::isfinite(g.d_w) || !std::isfinite(g.d_h)) {
          bad[idx] = 1;
        } else {
          Box b = boxes[idx];
          b.cx -= opt.step_size * g.d_cx;
          b.cy -= opt.step_size * g.d_cy;
          b.w = std::max(kMinDimension, b.w - opt.step_size * g.d_w);
          b.h = std::max(kMinDimension, b.h - opt.step_size * g.d_h);
          next[idx] = b;
        }
      } catch (...) {
        errors[idx] = std::current_exception();
      }
    }
    for (std::size_t a = 0; a < n; ++a) {
      if (errors[a]) std::rethrow_exception(errors[a]);
      if (bad[a]) {
        throw numerical_error("simulator: non-finite gradient at iteration " +
                                  std::to_string(iter) + ", anchor " +
                                  std::to_string(a),
                              iter, static_cast<int>(a));
      }
    }
    boxes.swap(next);
    record_metrics(boxes, scenario, spec.base, iter, report, scratch);
    report.ratio_applied.push_back(ratio_at(spec.schedule, epoch));
  }

  report.final_ious.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    const Box& gt = scenario.gts[static_cast<std::size_t>(scenario.anchors[a].gt)];
    report.final_ious[a] = iou(boxes[a], gt);
  }
  return report;
}

std::vector<ComparisonRow> compare_runs(
    const std::vector<std::pair<std::string, RegressionReport>>& reports) {
  if (reports.empty()) {
    throw std::invalid_argument("compare_runs: report list is empty");
  }
  const std::size_t len = reports.front().second.mean_iou.size();
  for (const auto& [label, report] : reports) {
    if (report.mean_iou.size() != len || report.frac_ge_50.size() != len ||
        report.frac_ge_90.size() != len) {
      throw std::invalid_argument("compare_runs: run \"" + label +
                                  "\" has a mismatched series length");
    }
  }

  const auto first_crossing = [](const std::vector<double>& series) {
    for (std::size_t k = 0; k < series.size(); ++k) {
      if (series[k] >= 0.5) return static_cast<int>(k);
    }
    return -1;
  };

  std::vector<ComparisonRow> rows;
  rows.reserve(reports.size());
  for (const auto& [label, report] : reports) {
    ComparisonRow row;
    row.label = label;
    row.cross_50 = first_crossing(report.frac_ge_50);
    row.cross_90 = first_crossing(report.frac_ge_90);
    row.final_mean_iou = report.mean_iou.back();
    row.final_frac_ge_90 = report.frac_ge_90.back();
    rows.push_back(row);
  }
  return rows;
}

std::string to_string(ConfidenceRule r) {
  switch (r) {
    case ConfidenceRule::constant_half: return "constant-half";
    case ConfidenceRule::iou_proxy: return "iou-proxy";
  }
  return "unknown";
}

ConfidenceRule confidence_rule_from_string(const std::string& name) {
  if (name == "constant-half") return ConfidenceRule::constant_half;
  if (name == "iou-proxy") return ConfidenceRule::iou_proxy;
  throw std::invalid_argument("unknown confidence rule \"" + name +
                              "\" (expected constant-half or iou-proxy)");
}

}  // namespace uiou
