#include <chrono>
#include <iostream>
#include <string>

#include "uiou/gradients.hpp"
#include "uiou/presets.hpp"
#include "uiou/simulator.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

bool same_series(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return false;  // bitwise equality, not tolerance
  }
  return true;
}

bool same_report(const uiou::RegressionReport& a, const uiou::RegressionReport& b) {
  return same_series(a.mean_iou, b.mean_iou) &&
         same_series(a.median_iou, b.median_iou) &&
         same_series(a.frac_ge_50, b.frac_ge_50) &&
         same_series(a.frac_ge_75, b.frac_ge_75) &&
         same_series(a.frac_ge_90, b.frac_ge_90) &&
         same_series(a.mean_loss, b.mean_loss) &&
         same_series(a.ratio_applied, b.ratio_applied) &&
         same_series(a.final_ious, b.final_ious);
}

}  // namespace

int main() {
  uiou::ScenarioConfig cfg;
  cfg.seed = 42;
  cfg.n_gt = 40;
  cfg.anchors_per_gt = 100;
  cfg.quality_mix = 0.3;
  cfg.confidence_rule = uiou::ConfidenceRule::iou_proxy;
  const uiou::Scenario scenario = uiou::generate_scenario(cfg);

  uiou::LossSpec spec;
  spec.base.variant = uiou::LossVariant::ciou;
  spec.schedule = uiou::RatioSchedule{uiou::ScheduleStrategy::linear, 2.0, 0.5, 300};
  spec.weight = uiou::WeightMode::focal_inv;

  uiou::OptimizerConfig opt;
  opt.step_size = 0.1;
  opt.iterations = 400;
  opt.iterations_per_epoch = 2;

  std::cout << "regression: " << scenario.anchors.size() << " anchors, "
            << opt.iterations << " iterations, CIoU + annealed ratio + weighting\n";

  auto t0 = clock_type::now();
  const uiou::RegressionReport serial =
      uiou::run_regression(scenario, spec, opt, uiou::ExecMode::serial);
  const double serial_s = seconds_since(t0);

  t0 = clock_type::now();
  const uiou::RegressionReport parallel =
      uiou::run_regression(scenario, spec, opt, uiou::ExecMode::parallel);
  const double parallel_s = seconds_since(t0);

  std::cout << "  serial:   " << serial_s << " s\n"
            << "  parallel: " << parallel_s << " s\n"
            << "  speedup:  " << serial_s / parallel_s << "x\n";
  if (!same_report(serial, parallel)) {
    std::cout << "MISMATCH: serial and parallel reports differ\n";
    return 1;
  }
  std::cout << "  reports bitwise identical\n";

  std::cout << "gradcheck: 4000 SIoU trials\n";
  t0 = clock_type::now();
  uiou::LossSpec siou;
  siou.base.variant = uiou::LossVariant::siou;
  const uiou::GradCheckReport gs =
      uiou::gradcheck(siou, 4000, 7, 1.0e-4, uiou::ExecMode::serial);
  const double gserial_s = seconds_since(t0);
  t0 = clock_type::now();
  const uiou::GradCheckReport gp =
      uiou::gradcheck(siou, 4000, 7, 1.0e-4, uiou::ExecMode::parallel);
  const double gparallel_s = seconds_since(t0);
  std::cout << "  serial:   " << gserial_s << " s\n"
            << "  parallel: " << gparallel_s << " s\n"
            << "  speedup:  " << gserial_s / gparallel_s << "x\n";
  if (gs.pass_rate != gp.pass_rate || gs.worst_rel_err != gp.worst_rel_err) {
    std::cout << "MISMATCH: serial and parallel gradcheck reports differ\n";
    return 1;
  }
  std::cout << "  reports identical\n";
  return 0;
}
