#include "uiou/unified.hpp"

#include <cmath>
#include <stdexcept>

namespace uiou {

double confidence_weight(double conf, WeightMode mode) {
  if (!std::isfinite(conf) || conf < 0.0 || conf > 1.0) {
    throw std::invalid_argument("confidence_weight: confidence must lie in [0, 1]");
  }
  switch (mode) {
    case WeightMode::none: return 1.0;
    case WeightMode::focal: return 1.0 - conf;
    case WeightMode::focal_inv: return conf;
  }
  throw std::invalid_argument("confidence_weight: unknown mode");
}

UnifiedValue unified_loss(const LossSpec& spec, const Prediction& pred,
                          const Box& gt, int epoch) {
  return unified_loss(spec, pred, gt, epoch, FrozenFactors{});
}

UnifiedValue unified_loss(const LossSpec& spec, const Prediction& pred,
                          const Box& gt, int epoch, const FrozenFactors& frozen) {
  validate_box(pred.box, "unified_loss pred");
  validate_box(gt, "unified_loss gt");
  const double ratio = ratio_at(spec.schedule, epoch);
  const Box scaled_pred = scale_box(pred.box, ratio);
  const Box scaled_gt = scale_box(gt, ratio);
  const LossValue base = geometric_loss(spec.base, scaled_pred, scaled_gt, frozen);
  const double weight = confidence_weight(pred.confidence, spec.weight);

  UnifiedValue out;
  out.penalty = base.penalty;
  out.scaled_iou = base.iou;
  out.raw_iou = iou(pred.box, gt);
  out.ratio = ratio;
  out.weight = weight;
  out.loss = spec.weight_applies_to == WeightTarget::loss
                 ? weight * base.loss
                 : 1.0 - weight * (1.0 - base.loss);
  return out;
}

std::string to_string(WeightMode m) {
  switch (m) {
    case WeightMode::none: return "none";
    case WeightMode::focal: return "focal";
    case WeightMode::focal_inv: return "focal-inv";
  }
  return "unknown";
}

WeightMode weight_mode_from_string(const std::string& name) {
  if (name == "none") return WeightMode::none;
  if (name == "focal") return WeightMode::focal;
  if (name == "focal-inv") return WeightMode::focal_inv;
  throw std::invalid_argument("unknown weight mode \"" + name +
                              "\" (expected one of none, focal, focal-inv)");
}

std::string to_string(WeightTarget t) {
  return t == WeightTarget::loss ? "loss" : "iou";
}

WeightTarget weight_target_from_string(const std::string& name) {
  if (name == "loss") return WeightTarget::loss;
  if (name == "iou") return WeightTarget::iou_value;
  throw std::invalid_argument("unknown weight target \"" + name +
                              "\" (expected loss or iou)");
}

}  // namespace uiou
