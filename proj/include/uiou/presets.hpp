#pragma once

#include <string>
#include <vector>

#include "uiou/serialization.hpp"

namespace uiou {

/// Names of the shipped simulator campaigns, in listing order.
std::vector<std::string> preset_names();

bool is_preset(const std::string& name);

/// Fully pinned RunConfig for a shipped campaign. Throws
/// std::invalid_argument for unknown names, listing the valid ones.
///
/// "fig4-desk": 1000 anchors, 90% low-quality, center jitter wide enough
/// that most low-quality anchors start disjoint from their GT. Runs plain
/// IoU at constant ratio 4 ("scaling-4") versus ratio 1 ("original");
/// enlargement restores a gradient to the disjoint anchors, so scaling-4
/// crosses fraction-IoU>=0.5 = 0.5 while original plateaus below it.
///
/// "ablation-desk": 1000 anchors, 30% high-quality, proxy confidences.
/// Six CIoU-based rows toggling box scaling, the annealed ratio schedule,
/// and confidence weighting: baseline, focal-box, focal-box+schedule,
/// focal, focal-inv, full.
RunConfig preset_run_config(const std::string& name);

/// Largest step size at which the mean base loss stays non-increasing over
/// the preset's full budget on its scenario; the monotonicity property is
/// verified at this step. Preset optimizers may use larger steps.
double preset_stability_bound(const std::string& name);

}  // namespace uiou
