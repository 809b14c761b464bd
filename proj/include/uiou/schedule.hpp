#pragma once

#include <string>

namespace uiou {

enum class ScheduleStrategy { linear, cosine, fraction, constant };

/// Maps a training epoch to the box-scaling ratio. The three named
/// strategies decay monotonically from start_ratio at epoch 0 to end_ratio
/// at total_epochs; constant ignores the epoch and returns constant_value.
struct RatioSchedule {
  ScheduleStrategy strategy = ScheduleStrategy::constant;
  double start_ratio = 2.0;
  double end_ratio = 0.5;
  int total_epochs = 300;
  double constant_value = 1.0;  // used only by the constant strategy
};

RatioSchedule constant_schedule(double value, int total_epochs = 1000000);

/// Throws std::invalid_argument when the schedule parameters are invalid.
void validate_schedule(const RatioSchedule& s);

/// Ratio applied at `epoch`. Throws std::out_of_range unless
/// 0 <= epoch <= total_epochs; epochs past the end are not extrapolated.
double ratio_at(const RatioSchedule& s, int epoch);

std::string to_string(ScheduleStrategy s);
ScheduleStrategy schedule_strategy_from_string(const std::string& name);

}  // namespace uiou
