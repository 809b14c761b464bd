#pragma once

#include <cstdint>
#include <vector>

#include "uiou/exec.hpp"
#include "uiou/geometry.hpp"
#include "uiou/unified.hpp"

namespace uiou {

/// Gradient of a unified loss with respect to the prediction's
/// center-size parameters (cx, cy, w, h), in the unscaled frame.
struct BoxGrad {
  double d_cx = 0.0;
  double d_cy = 0.0;
  double d_w = 0.0;
  double d_h = 0.0;
};

/// Exact derivative of unified_loss at the given pair. Piecewise terms
/// (corner min/max, overlap clamps, absolute values) use the one-sided
/// subgradient with ties broken toward zero. Factors that the loss
/// treats as constants under differentiation (the CIoU trade-off and
/// the WIoU distance denominator) are held at their current values.
/// Throws std::invalid_argument when pred.box has w <= 0 or h <= 0.
BoxGrad analytic_grad(const LossSpec& spec, const Prediction& pred,
                      const Box& gt, int epoch);

/// Central-difference approximation with step `step` per parameter.
/// The held-constant factors are pinned at the unperturbed pair so the
/// quotient targets the same function analytic_grad differentiates.
BoxGrad finite_diff_grad(const LossSpec& spec, const Prediction& pred,
                         const Box& gt, int epoch, double step);

struct GradCheckFailure {
  Box pred;
  Box gt;
  char param = '?';  // 'x', 'y', 'w' or 'h'
  double analytic = 0.0;
  double fd = 0.0;
  double rel_err = 0.0;
};

struct GradCheckReport {
  int trials = 0;
  int passed = 0;
  double pass_rate = 0.0;
  double worst_rel_err = 0.0;
  std::vector<GradCheckFailure> failures;  // capped at 10 entries
};

/// Compares analytic_grad against finite_diff_grad on `trials` seeded
/// random pairs. Samples landing within a step-scaled margin of any
/// selector tie are redrawn, since the two routes legitimately diverge
/// across kinks. A trial passes when the max component error, relative
/// to the larger gradient magnitude, stays within tol.
GradCheckReport gradcheck(const LossSpec& spec, int trials, std::uint64_t seed,
                          double tol, ExecMode mode = ExecMode::parallel);

}  // namespace uiou
