#pragma once

#include "uiou/geometry.hpp"
#include "uiou/losses.hpp"
#include "uiou/schedule.hpp"

namespace uiou {

enum class WeightMode { none, focal, focal_inv };

/// What the confidence weight multiplies: the whole loss value (default,
/// preserves the zero-loss fixed point at perfect overlap) or the
/// calculated IoU value, i.e. loss = 1 - weight * (1 - base_loss).
enum class WeightTarget { loss, iou_value };

/// Full unified-loss configuration: base geometric loss, ratio schedule,
/// and confidence weighting.
struct LossSpec {
  LossKind base;
  RatioSchedule schedule = constant_schedule(1.0);
  WeightMode weight = WeightMode::none;
  WeightTarget weight_applies_to = WeightTarget::loss;
};

struct Prediction {
  Box box;
  double confidence = 1.0;  // in [0, 1]
};

/// Unified loss evaluation with its diagnostics. `scaled_iou` is the IoU of
/// the ratio-scaled pair (the one the loss sees); `raw_iou` the unscaled
/// pair's IoU; `penalty` the base loss's non-IoU term on the scaled pair.
struct UnifiedValue {
  double loss = 0.0;
  double penalty = 0.0;
  double scaled_iou = 0.0;
  double raw_iou = 0.0;
  double ratio = 1.0;
  double weight = 1.0;
};

/// none -> 1, focal -> 1 - conf, focal_inv -> conf.
/// Throws std::invalid_argument unless conf lies in [0, 1].
double confidence_weight(double conf, WeightMode mode);

UnifiedValue unified_loss(const LossSpec& spec, const Prediction& pred,
                          const Box& gt, int epoch);

/// Evaluation with the gradient-constant factors pinned to externally
/// captured values (see FrozenFactors); used by the finite-difference
/// gradient oracle.
UnifiedValue unified_loss(const LossSpec& spec, const Prediction& pred,
                          const Box& gt, int epoch, const FrozenFactors& frozen);

std::string to_string(WeightMode m);
WeightMode weight_mode_from_string(const std::string& name);
std::string to_string(WeightTarget t);
WeightTarget weight_target_from_string(const std::string& name);

}  // namespace uiou
