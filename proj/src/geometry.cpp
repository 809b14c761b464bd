#include "uiou/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace uiou {

bool box_is_valid(const Box& b) {
  return std::isfinite(b.cx) && std::isfinite(b.cy) && std::isfinite(b.w) &&
         std::isfinite(b.h) && b.w >= 0.0 && b.h >= 0.0;
}

void validate_box(const Box& b, const char* what) {
  if (!box_is_valid(b)) {
    throw std::invalid_argument(std::string(what) +
                                ": box fields must be finite with w >= 0 and h >= 0");
  }
}

double area(const Box& b) { return b.w * b.h; }

double intersection_area(const Box& a, const Box& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  if (iw <= 0.0) return 0.0;
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (ih <= 0.0) return 0.0;
  return iw * ih;
}

double union_area(const Box& a, const Box& b) {
  return area(a) + area(b) - intersection_area(a, b);
}

Box enclosing_box(const Box& a, const Box& b) {
  return Box::from_corners(std::min(a.left(), b.left()), std::min(a.top(), b.top()),
                           std::max(a.right(), b.right()),
                           std::max(a.bottom(), b.bottom()));
}

Box scale_box(const Box& b, double ratio) {
  if (!std::isfinite(ratio) || ratio <= 0.0) {
    throw std::invalid_argument("scale_box: ratio must be finite and > 0");
  }
  return Box{b.cx, b.cy, b.w * ratio, b.h * ratio};
}

EdgeDistances edge_distances(double px, double py, const Box& b) {
  const EdgeDistances d{py - b.top(), b.bottom() - py, px - b.left(), b.right() - px};
  if (d.xt < 0.0 || d.xb < 0.0 || d.xl < 0.0 || d.xr < 0.0) {
    throw std::domain_error("edge_distances: pixel lies outside the box");
  }
  return d;
}

double iou(const Box& a, const Box& b) {
  const double u = union_area(a, b);
  if (u <= 0.0) return 0.0;
  return intersection_area(a, b) / u;
}

}  // namespace uiou
