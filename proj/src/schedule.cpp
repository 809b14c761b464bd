#include "uiou/schedule.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace uiou {

RatioSchedule constant_schedule(double value, int total_epochs) {
  RatioSchedule s;
  s.strategy = ScheduleStrategy::constant;
  s.constant_value = value;
  s.total_epochs = total_epochs;
  return s;
}

void validate_schedule(const RatioSchedule& s) {
  if (s.total_epochs <= 0) {
    throw std::invalid_argument("schedule: total_epochs must be > 0");
  }
  if (s.strategy == ScheduleStrategy::constant) {
    if (!std::isfinite(s.constant_value) || s.constant_value <= 0.0) {
      throw std::invalid_argument("schedule: constant value must be finite and > 0");
    }
    return;
  }
  if (!std::isfinite(s.start_ratio) || s.start_ratio <= 0.0 ||
      !std::isfinite(s.end_ratio) || s.end_ratio <= 0.0) {
    throw std::invalid_argument("schedule: start and end ratios must be finite and > 0");
  }
  if (s.start_ratio < s.end_ratio) {
    throw std::invalid_argument("schedule: start_ratio must be >= end_ratio");
  }
}

double ratio_at(const RatioSchedule& s, int epoch) {
  validate_schedule(s);
  if (epoch < 0 || epoch > s.total_epochs) {
    throw std::out_of_range("ratio_at: epoch must lie in [0, total_epochs]");
  }
  switch (s.strategy) {
    case ScheduleStrategy::constant:
      return s.constant_value;
    case ScheduleStrategy::linear: {
      const double t = static_cast<double>(epoch) / s.total_epochs;
      return s.start_ratio + (s.end_ratio - s.start_ratio) * t;
    }
    case ScheduleStrategy::cosine: {
      const double t = static_cast<double>(epoch) / s.total_epochs;
      return s.end_ratio +
             (s.start_ratio - s.end_ratio) * 0.5 * (1.0 + std::cos(std::numbers::pi * t));
    }
    case ScheduleStrategy::fraction: {
      // a / (epoch + b) with b chosen so the endpoints hit start and end
      // exactly; degenerates to a constant when start == end.
      if (s.start_ratio == s.end_ratio) return s.start_ratio;
      const double b = s.total_epochs * s.end_ratio / (s.start_ratio - s.end_ratio);
      return s.start_ratio * b / (epoch + b);
    }
  }
  throw std::invalid_argument("ratio_at: unknown strategy");
}

std::string to_string(ScheduleStrategy s) {
  switch (s) {
    case ScheduleStrategy::linear: return "linear";
    case ScheduleStrategy::cosine: return "cos";
    case ScheduleStrategy::fraction: return "fraction";
    case ScheduleStrategy::constant: return "constant";
  }
  return "unknown";
}

ScheduleStrategy schedule_strategy_from_string(const std::string& name) {
  if (name == "linear") return ScheduleStrategy::linear;
  if (name == "cos") return ScheduleStrategy::cosine;
  if (name == "fraction") return ScheduleStrategy::fraction;
  if (name == "constant") return ScheduleStrategy::constant;
  throw std::invalid_argument("unknown schedule strategy \"" + name +
                              "\" (expected one of linear, cos, fraction, constant)");
}

}  // namespace uiou
