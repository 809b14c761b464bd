#include "uiou/sweep.hpp"

#include <cmath>
#include <stdexcept>

namespace uiou {

CurveTable iou_curve(const Box& shape, SweepAxis axis, double from, double to,
                     int steps, const std::vector<double>& ratios) {
  validate_box(shape, "iou_curve shape");
  if (steps < 2) throw std::invalid_argument("iou_curve: steps must be >= 2");
  if (!std::isfinite(from) || !std::isfinite(to)) {
    throw std::invalid_argument("iou_curve: sweep endpoints must be finite");
  }
  if (ratios.empty()) throw std::invalid_argument("iou_curve: ratio list is empty");
  for (double r : ratios) {
    if (!std::isfinite(r) || r <= 0.0) {
      throw std::invalid_argument("iou_curve: ratios must be finite and > 0");
    }
  }

  CurveTable table;
  table.axis = axis;
  table.ratios = ratios;
  table.rows.reserve(static_cast<std::size_t>(steps));
  const double n1 = static_cast<double>(steps - 1);
  for (int k = 0; k < steps; ++k) {
    // Convex form of the grid point; endpoints and integer-representable
    // interior points are exact.
    const double d = (from * (n1 - k) + to * k) / n1;
    const double ox = axis == SweepAxis::y ? 0.0 : d;
    const double oy = axis == SweepAxis::x ? 0.0 : d;
    const Box moved{shape.cx + ox, shape.cy + oy, shape.w, shape.h};
    CurveRow row;
    row.distance = d;
    row.ious.reserve(ratios.size());
    for (double r : ratios) {
      row.ious.push_back(iou(scale_box(moved, r), scale_box(shape, r)));
    }
    table.rows.push_back(row);
  }
  return table;
}

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::x: return "x";
    case SweepAxis::y: return "y";
    case SweepAxis::diag: return "diag";
  }
  return "unknown";
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  if (name == "x") return SweepAxis::x;
  if (name == "y") return SweepAxis::y;
  if (name == "diag") return SweepAxis::diag;
  throw std::invalid_argument("unknown sweep axis \"" + name +
                              "\" (expected one of x, y, diag)");
}

}  // namespace uiou
