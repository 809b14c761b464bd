#pragma once

namespace uiou {

/// Axis-aligned box in center-size parameterization. Corner form is
/// derived on demand and never stored.
struct Box {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;  // >= 0
  double h = 0.0;  // >= 0

  double left() const { return cx - 0.5 * w; }
  double right() const { return cx + 0.5 * w; }
  double top() const { return cy - 0.5 * h; }
  double bottom() const { return cy + 0.5 * h; }

  static Box from_corners(double l, double t, double r, double b) {
    return Box{0.5 * (l + r), 0.5 * (t + b), r - l, b - t};
  }
};

/// Distances from a pixel to the four borders of a box: top, bottom,
/// left, right. All non-negative when the pixel is inside the box.
struct EdgeDistances {
  double xt = 0.0;
  double xb = 0.0;
  double xl = 0.0;
  double xr = 0.0;
};

bool box_is_valid(const Box& b);

/// Throws std::invalid_argument when the box violates its invariants.
/// `what` names the offending argument in the message.
void validate_box(const Box& b, const char* what);

double area(const Box& b);
double intersection_area(const Box& a, const Box& b);
double union_area(const Box& a, const Box& b);

/// Smallest axis-aligned box containing both inputs.
Box enclosing_box(const Box& a, const Box& b);

/// Scales width and height by `ratio`, keeping the center fixed.
/// Throws std::invalid_argument unless ratio is finite and > 0.
Box scale_box(const Box& b, double ratio);

/// Throws std::domain_error when the pixel lies outside the box.
EdgeDistances edge_distances(double px, double py, const Box& b);

/// Intersection over union of two boxes; defined as 0 when the union
/// area is 0 (both boxes degenerate).
double iou(const Box& a, const Box& b);

}  // namespace uiou
