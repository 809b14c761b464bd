#pragma once

#include <string>
#include <vector>

#include "uiou/geometry.hpp"

namespace uiou {

/// Direction the prediction copy is displaced along. diag moves it by the
/// sweep distance on both axes at once, so distance 5 lands on the
/// offset-(5,5) geometry.
enum class SweepAxis { x, y, diag };

struct CurveRow {
  double distance = 0.0;
  std::vector<double> ious;  // one per requested ratio, same order
};

struct CurveTable {
  SweepAxis axis = SweepAxis::x;
  std::vector<double> ratios;
  std::vector<CurveRow> rows;
};

/// IoU of two copies of `shape`, one displaced by each sampled distance,
/// after scaling both copies by each ratio. Distances are sampled on an
/// exact linear grid from `from` to `to` inclusive: integer grid values come
/// out exact, so threshold rows like distance 5 or 10 carry no rounding.
/// Throws std::invalid_argument on steps < 2, an empty or invalid ratio
/// list, non-finite endpoints, or an invalid shape.
CurveTable iou_curve(const Box& shape, SweepAxis axis, double from, double to,
                     int steps, const std::vector<double>& ratios);

std::string to_string(SweepAxis a);
SweepAxis sweep_axis_from_string(const std::string& name);

}  // namespace uiou
