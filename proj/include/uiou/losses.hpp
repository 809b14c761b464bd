#pragma once

#include <optional>
#include <string>

#include "uiou/geometry.hpp"

namespace uiou {

enum class LossVariant {
  l2_vector,  // squared difference of border-distance four-vectors
  iou,
  giou,
  diou,
  ciou,
  eiou,
  siou,
  wiou_v1,
};

/// A geometric loss selection. `alpha` > 1 switches the iou/giou/diou/ciou
/// variants to their power-family form; other variants accept alpha == 1
/// only. When `alpha_powers_penalties` is set (the canonical power-family
/// rule) the power is applied to each penalty term as well as the IoU term;
/// when cleared only the IoU term is powered.
struct LossKind {
  LossVariant variant = LossVariant::ciou;
  double alpha = 1.0;
  bool alpha_powers_penalties = true;
};

/// Scalar loss plus its decomposition: `iou` is the plain intersection-over-
/// union of the pair and `penalty` the part of the loss not explained by the
/// (possibly powered) IoU term, so loss == iou_term + penalty always holds.
struct LossValue {
  double loss = 0.0;
  double iou = 0.0;
  double penalty = 0.0;
};

/// Factors that the loss treats as constants under differentiation:
/// ciou's trade-off coefficient and wiou's enclosure-diagonal denominator.
/// Capturing them at a base configuration and re-evaluating the loss with
/// them pinned yields the surrogate whose true derivative the analytic
/// gradient computes.
struct FrozenFactors {
  std::optional<double> ciou_tradeoff;
  std::optional<double> wiou_denominator;
};

FrozenFactors capture_frozen_factors(const LossKind& kind, const Box& pred,
                                     const Box& gt);

double l2_vector_loss(const EdgeDistances& a, const EdgeDistances& b);

LossValue geometric_loss(const LossKind& kind, const Box& pred, const Box& gt);
LossValue geometric_loss(const LossKind& kind, const Box& pred, const Box& gt,
                         const FrozenFactors& frozen);

bool alpha_supported(LossVariant v);

/// Throws std::invalid_argument on an invalid alpha or an unsupported
/// (variant, alpha) combination.
void validate_loss_kind(const LossKind& kind);

std::string to_string(LossVariant v);
LossVariant loss_variant_from_string(const std::string& name);

}  // namespace uiou
