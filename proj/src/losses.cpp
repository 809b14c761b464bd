#include "uiou/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace uiou {
namespace {

struct PairTerms {
  double iou = 0.0;
  double enclosure_w = 0.0;
  double enclosure_h = 0.0;
  double enclosure_area = 0.0;
  double union_area = 0.0;
  double center_dist_sq = 0.0;
  double diag_sq = 0.0;  // squared diagonal of the enclosing box
};

PairTerms pair_terms(const Box& p, const Box& g) {
  PairTerms t;
  t.iou = iou(p, g);
  const Box c = enclosing_box(p, g);
  t.enclosure_w = c.w;
  t.enclosure_h = c.h;
  t.enclosure_area = area(c);
  t.union_area = union_area(p, g);
  const double dx = p.cx - g.cx;
  const double dy = p.cy - g.cy;
  t.center_dist_sq = dx * dx + dy * dy;
  t.diag_sq = c.w * c.w + c.h * c.h;
  return t;
}

double safe_div(double num, double den) { return den > 0.0 ? num / den : 0.0; }

double ciou_aspect_term(const Box& p, const Box& g) {
  // atan2 handles degenerate 0/0 aspect ratios.
  const double d = std::atan2(g.w, g.h) - std::atan2(p.w, p.h);
  return 4.0 / (std::numbers::pi * std::numbers::pi) * d * d;
}

// Angle cost of the siou loss: sin(2*theta) where theta is the angle between
// the center-connecting line and its nearest axis. Zero at aligned centers
// (and at zero center distance, by taking the limit x -> 0).
double siou_angle_cost(double adx, double ady, double dist) {
  if (dist <= 0.0) return 0.0;
  double x = std::min(adx, ady) / dist;
  x = std::clamp(x, 0.0, 1.0);
  return 2.0 * x * std::sqrt(1.0 - x * x);
}

double siou_penalty(const Box& p, const Box& g, const PairTerms& t) {
  const double dx = g.cx - p.cx;
  const double dy = g.cy - p.cy;
  const double dist = std::sqrt(t.center_dist_sq);
  const double lambda = siou_angle_cost(std::abs(dx), std::abs(dy), dist);
  const double gamma = 2.0 - lambda;
  const double rho_x = safe_div(dx, t.enclosure_w) * safe_div(dx, t.enclosure_w);
  const double rho_y = safe_div(dy, t.enclosure_h) * safe_div(dy, t.enclosure_h);
  const double dist_cost = (1.0 - std::exp(-gamma * rho_x)) + (1.0 - std::exp(-gamma * rho_y));
  const double omega_w = safe_div(std::abs(p.w - g.w), std::max(p.w, g.w));
  const double omega_h = safe_div(std::abs(p.h - g.h), std::max(p.h, g.h));
  constexpr double theta = 4.0;  // shape-cost exponent
  const double shape_cost = std::pow(1.0 - std::exp(-omega_w), theta) +
                            std::pow(1.0 - std::exp(-omega_h), theta);
  return 0.5 * (dist_cost + shape_cost);
}

}  // namespace

FrozenFactors capture_frozen_factors(const LossKind& kind, const Box& pred,
                                     const Box& gt) {
  FrozenFactors f;
  if (kind.variant == LossVariant::ciou) {
    const PairTerms t = pair_terms(pred, gt);
    const double v = ciou_aspect_term(pred, gt);
    const double den = (1.0 - t.iou) + v;
    f.ciou_tradeoff = den > 0.0 ? v / den : 0.0;
  } else if (kind.variant == LossVariant::wiou_v1) {
    const PairTerms t = pair_terms(pred, gt);
    f.wiou_denominator = t.diag_sq;
  }
  return f;
}

double l2_vector_loss(const EdgeDistances& a, const EdgeDistances& b) {
  const double dt = a.xt - b.xt;
  const double db = a.xb - b.xb;
  const double dl = a.xl - b.xl;
  const double dr = a.xr - b.xr;
  return dt * dt + db * db + dl * dl + dr * dr;
}

bool alpha_supported(LossVariant v) {
  switch (v) {
    case LossVariant::iou:
    case LossVariant::giou:
    case LossVariant::diou:
    case LossVariant::ciou:
      return true;
    default:
      return false;
  }
}

void validate_loss_kind(const LossKind& kind) {
  if (!std::isfinite(kind.alpha) || kind.alpha < 1.0) {
    throw std::invalid_argument("loss kind: alpha must be finite and >= 1");
  }
  if (kind.alpha != 1.0 && !alpha_supported(kind.variant)) {
    throw std::invalid_argument("loss kind: alpha > 1 is only supported for " +
                                std::string("iou/giou/diou/ciou, got ") +
                                to_string(kind.variant));
  }
}

LossValue geometric_loss(const LossKind& kind, const Box& pred, const Box& gt) {
  return geometric_loss(kind, pred, gt, FrozenFactors{});
}

LossValue geometric_loss(const LossKind& kind, const Box& pred, const Box& gt,
                         const FrozenFactors& frozen) {
  validate_loss_kind(kind);

  if (kind.variant == LossVariant::l2_vector) {
    const double dl = pred.left() - gt.left();
    const double dr = pred.right() - gt.right();
    const double dt = pred.top() - gt.top();
    const double db = pred.bottom() - gt.bottom();
    const double loss = dl * dl + dr * dr + dt * dt + db * db;
    return LossValue{loss, iou(pred, gt), loss};
  }

  const PairTerms t = pair_terms(pred, gt);
  const double a = kind.alpha;
  const bool power_pen = kind.alpha_powers_penalties && a != 1.0;
  const auto pen_pow = [&](double p) { return power_pen ? std::pow(p, a) : p; };
  const double iou_term = a == 1.0 ? 1.0 - t.iou : 1.0 - std::pow(t.iou, a);

  double penalty = 0.0;
  switch (kind.variant) {
    case LossVariant::iou:
      break;
    case LossVariant::giou:
      // The enclosure contains the union, so the gap is non-negative up to
      // rounding; clamping keeps the penalty (and powered penalty) >= 0.
      penalty = pen_pow(safe_div(
          std::max(0.0, t.enclosure_area - t.union_area), t.enclosure_area));
      break;
    case LossVariant::diou:
      penalty = pen_pow(safe_div(t.center_dist_sq, t.diag_sq));
      break;
    case LossVariant::ciou: {
      const double v = ciou_aspect_term(pred, gt);
      double tradeoff;
      if (frozen.ciou_tradeoff) {
        tradeoff = *frozen.ciou_tradeoff;
      } else {
        const double den = (1.0 - t.iou) + v;
        tradeoff = den > 0.0 ? v / den : 0.0;
      }
      penalty = pen_pow(safe_div(t.center_dist_sq, t.diag_sq)) + pen_pow(tradeoff * v);
      break;
    }
    case LossVariant::eiou: {
      const double dw = pred.w - gt.w;
      const double dh = pred.h - gt.h;
      penalty = safe_div(t.center_dist_sq, t.diag_sq) +
                safe_div(dw * dw, t.enclosure_w * t.enclosure_w) +
                safe_div(dh * dh, t.enclosure_h * t.enclosure_h);
      break;
    }
    case LossVariant::siou:
      penalty = siou_penalty(pred, gt, t);
      break;
    case LossVariant::wiou_v1: {
      const double den = frozen.wiou_denominator ? *frozen.wiou_denominator : t.diag_sq;
      const double factor = den > 0.0 ? std::exp(t.center_dist_sq / den) : 1.0;
      // loss = factor * (1 - iou); report the excess over the plain IoU loss
      // as the penalty so loss == iou_term + penalty still holds.
      penalty = (factor - 1.0) * (1.0 - t.iou);
      break;
    }
    case LossVariant::l2_vector:
      break;  // handled above
  }

  return LossValue{iou_term + penalty, t.iou, penalty};
}

std::string to_string(LossVariant v) {
  switch (v) {
    case LossVariant::l2_vector: return "l2";
    case LossVariant::iou: return "iou";
    case LossVariant::giou: return "giou";
    case LossVariant::diou: return "diou";
    case LossVariant::ciou: return "ciou";
    case LossVariant::eiou: return "eiou";
    case LossVariant::siou: return "siou";
    case LossVariant::wiou_v1: return "wiou";
  }
  return "unknown";
}

LossVariant loss_variant_from_string(const std::string& name) {
  if (name == "l2") return LossVariant::l2_vector;
  if (name == "iou") return LossVariant::iou;
  if (name == "giou") return LossVariant::giou;
  if (name == "diou") return LossVariant::diou;
  if (name == "ciou") return LossVariant::ciou;
  if (name == "eiou") return LossVariant::eiou;
  if (name == "siou") return LossVariant::siou;
  if (name == "wiou") return LossVariant::wiou_v1;
  throw std::invalid_argument("unknown loss variant \"" + name +
                              "\" (expected one of l2, iou, giou, diou, ciou, eiou, siou, wiou)");
}

}  // namespace uiou
