#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "uiou/gradients.hpp"
#include "uiou/presets.hpp"
#include "uiou/serialization.hpp"
#include "uiou/simulator.hpp"
#include "uiou/sweep.hpp"
#include "uiou/unified.hpp"

namespace {

using nlohmann::json;

uiou::Box parse_box_arg(const std::string& text, bool corners, const char* what) {
  std::vector<double> vals;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    const std::size_t comma = text.find(',', begin);
    const std::string piece =
        text.substr(begin, comma == std::string::npos ? comma : comma - begin);
    try {
      std::size_t used = 0;
      const double v = std::stod(piece, &used);
      if (used != piece.size() || !std::isfinite(v)) throw std::invalid_argument("");
      vals.push_back(v);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(what) + ": \"" + text +
                                  "\" is not four comma-separated reals");
    }
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  if (vals.size() != 4) {
    throw std::invalid_argument(std::string(what) + ": expected \"" +
                                (corners ? "x1,y1,x2,y2" : "cx,cy,w,h") +
                                "\" (got \"" + text + "\")");
  }
  const uiou::Box box = corners
                            ? uiou::Box::from_corners(vals[0], vals[1], vals[2], vals[3])
                            : uiou::Box{vals[0], vals[1], vals[2], vals[3]};
  uiou::validate_box(box, what);
  return box;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

int first_crossing(const std::vector<double>& series) {
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (series[k] >= 0.5) return static_cast<int>(k);
  }
  return -1;
}

// Flag bundles bound to CLI11 options.

struct SpecArgs {
  std::string loss;
  double alpha = 1.0;
  bool alpha_penalties = true;
  double ratio = 1.0;
  bool ratio_set = false;
  std::string schedule;
  double start = 2.0;
  double end = 0.5;
  int epochs = 300;
  std::string weight = "none";
  std::string weight_target = "loss";

  uiou::LossSpec build() const {
    uiou::LossSpec spec;
    spec.base.variant = uiou::loss_variant_from_string(loss);
    spec.base.alpha = alpha;
    spec.base.alpha_powers_penalties = alpha_penalties;
    if (!schedule.empty()) {
      spec.schedule.strategy = uiou::schedule_strategy_from_string(schedule);
      if (spec.schedule.strategy == uiou::ScheduleStrategy::constant) {
        spec.schedule = uiou::constant_schedule(ratio_set ? ratio : 1.0);
      } else {
        spec.schedule.start_ratio = start;
        spec.schedule.end_ratio = end;
        spec.schedule.total_epochs = epochs;
      }
    } else {
      spec.schedule = uiou::constant_schedule(ratio);
    }
    spec.weight = uiou::weight_mode_from_string(weight);
    spec.weight_applies_to = uiou::weight_target_from_string(weight_target);
    uiou::validate_loss_kind(spec.base);
    uiou::validate_schedule(spec.schedule);
    return spec;
  }
};

void add_spec_options(CLI::App* cmd, SpecArgs& args, bool schedule_flags) {
  cmd->add_option("--loss", args.loss,
                  "base loss: l2|iou|giou|diou|ciou|eiou|siou|wiou")
      ->required();
  cmd->add_option("--alpha", args.alpha, "power exponent for iou/giou/diou/ciou")
      ->capture_default_str();
  cmd->add_flag("--alpha-penalties,!--no-alpha-penalties", args.alpha_penalties,
                "raise penalty terms to alpha as well (default on)");
  if (schedule_flags) {
    cmd->add_option("--ratio", args.ratio, "constant box-scaling ratio")
        ->capture_default_str();
    cmd->add_option("--schedule", args.schedule,
                    "ratio schedule: linear|cos|fraction|constant");
    cmd->add_option("--start", args.start, "schedule start ratio")
        ->capture_default_str();
    cmd->add_option("--end", args.end, "schedule end ratio")->capture_default_str();
    cmd->add_option("--epochs", args.epochs, "schedule length in epochs")
        ->capture_default_str();
    cmd->add_option("--weight", args.weight,
                    "confidence weighting: none|focal|focal-inv")
        ->capture_default_str();
    cmd->add_option("--weight-applies-to", args.weight_target,
                    "what the weight multiplies: loss|iou")
        ->capture_default_str();
  }
}

struct ComputeArgs {
  std::string pred;
  std::string gt;
  bool corners = false;
  SpecArgs spec;
  double conf = 1.0;
  int epoch = 0;
};

int run_compute(const ComputeArgs& args) {
  const uiou::Box pred = parse_box_arg(args.pred, args.corners, "pred");
  const uiou::Box gt = parse_box_arg(args.gt, args.corners, "gt");
  const uiou::LossSpec spec = args.spec.build();
  const uiou::UnifiedValue value =
      uiou::unified_loss(spec, uiou::Prediction{pred, args.conf}, gt, args.epoch);
  std::cout << uiou::to_json(value).dump(2) << '\n';
  return 0;
}

struct CurveArgs {
  std::string box = "0,0,10,10";
  bool corners = false;
  std::string axis = "x";
  double from = 20.0;
  double to = 0.0;
  int steps = 201;
  std::vector<double> ratios = {1.0, 0.5, 2.0};
  std::string out_dir;
  std::string format = "csv";
};

int run_curve(const CurveArgs& args) {
  const uiou::Box shape = parse_box_arg(args.box, args.corners, "box");
  const uiou::CurveTable table =
      uiou::iou_curve(shape, uiou::sweep_axis_from_string(args.axis), args.from,
                      args.to, args.steps, args.ratios);
  const bool as_json = args.format == "json";
  const std::string content =
      as_json ? uiou::to_json(table).dump(2) + "\n" : uiou::curve_csv(table);
  if (args.out_dir.empty()) {
    std::cout << content;
  } else {
    std::filesystem::create_directories(args.out_dir);
    write_file(std::filesystem::path(args.out_dir) / (as_json ? "curve.json" : "curve.csv"),
               content);
  }
  return 0;
}

struct ScheduleArgs {
  std::string strategy = "linear";
  double start = 2.0;
  double end = 0.5;
  int epochs = 300;
  double value = 1.0;
  std::string out_dir;
  std::string format = "csv";
};

int run_schedule(const ScheduleArgs& args) {
  uiou::RatioSchedule s;
  s.strategy = uiou::schedule_strategy_from_string(args.strategy);
  s.start_ratio = args.start;
  s.end_ratio = args.end;
  s.total_epochs = args.epochs;
  s.constant_value = args.value;
  uiou::validate_schedule(s);
  std::string content;
  if (args.format == "json") {
    json rows = json::array();
    for (int e = 0; e <= s.total_epochs; ++e) {
      rows.push_back(json{{"epoch", e}, {"ratio", uiou::ratio_at(s, e)}});
    }
    content = rows.dump(2) + "\n";
  } else {
    content = uiou::schedule_csv(s);
  }
  if (args.out_dir.empty()) {
    std::cout << content;
  } else {
    std::filesystem::create_directories(args.out_dir);
    write_file(std::filesystem::path(args.out_dir) /
                   (args.format == "json" ? "schedule.json" : "schedule.csv"),
               content);
  }
  return 0;
}

struct GradCheckArgs {
  SpecArgs spec;
  int trials = 1000;
  std::uint64_t seed = 1;
  double tol = 1.0e-4;
  bool serial = false;
  std::string out_dir;
};

int run_gradcheck(const GradCheckArgs& args) {
  const uiou::LossSpec spec = args.spec.build();
  const uiou::GradCheckReport report =
      uiou::gradcheck(spec, args.trials, args.seed, args.tol,
                      args.serial ? uiou::ExecMode::serial : uiou::ExecMode::parallel);
  const std::string content = uiou::to_json(report, spec.base).dump(2) + "\n";
  std::cout << content;
  if (!args.out_dir.empty()) {
    std::filesystem::create_directories(args.out_dir);
    write_file(std::filesystem::path(args.out_dir) / "gradcheck.json", content);
  }
  return report.pass_rate >= 0.95 ? 0 : 1;
}

struct SimulateArgs {
  std::string config_file;
  std::string preset;
  std::string out_dir;
  std::string format;
  bool serial = false;
};

int run_simulate(const SimulateArgs& args) {
  uiou::RunConfig cfg = args.preset.empty() ? uiou::load_run_config(args.config_file)
                                            : uiou::preset_run_config(args.preset);
  if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
  if (!args.format.empty()) {
    cfg.write_csv = args.format == "csv";
    cfg.write_json = args.format == "json";
  }
  const uiou::ExecMode mode =
      args.serial ? uiou::ExecMode::serial : uiou::ExecMode::parallel;

  const std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);
  write_file(dir / "config.json", uiou::to_json(cfg).dump(2) + "\n");

  std::vector<std::pair<std::string, uiou::RegressionReport>> labeled;
  labeled.reserve(cfg.runs.size());
  for (const uiou::RunEntry& run : cfg.runs) {
    const uiou::Scenario scenario = uiou::generate_scenario(run.scenario);
    uiou::RegressionReport report =
        uiou::run_regression(scenario, run.loss_spec, run.optimizer, mode);
    if (cfg.write_csv) write_file(dir / (run.label + ".csv"), uiou::report_csv(report));
    if (cfg.write_json) {
      write_file(dir / (run.label + ".json"), uiou::to_json(report).dump(2) + "\n");
    }
    const int iterations = static_cast<int>(report.mean_iou.size()) - 1;
    const int c50 = first_crossing(report.frac_ge_50);
    std::cout << run.label << ": " << iterations << " iterations, final mean IoU "
              << uiou::format_double(report.mean_iou.back()) << ", frac>=0.9 "
              << uiou::format_double(report.frac_ge_90.back())
              << ", frac>=0.5 crosses 0.5 at "
              << (c50 < 0 ? std::string("never") : std::to_string(c50)) << '\n';
    labeled.emplace_back(run.label, std::move(report));
  }
  if (labeled.size() >= 2) {
    const std::vector<uiou::ComparisonRow> rows = uiou::compare_runs(labeled);
    if (cfg.write_csv) write_file(dir / "comparison.csv", uiou::comparison_csv(rows));
    if (cfg.write_json) {
      write_file(dir / "comparison.json", uiou::to_json(rows).dump(2) + "\n");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Box-regression loss laboratory: scaled IoU losses, ratio schedules, "
               "gradient checks, and desk-scale regression experiments"};
  app.require_subcommand(1);

  ComputeArgs compute_args;
  CLI::App* compute = app.add_subcommand(
      "compute", "evaluate one loss on a prediction/GT box pair, print JSON");
  compute->add_option("--pred", compute_args.pred, "prediction box \"cx,cy,w,h\"")
      ->required();
  compute->add_option("--gt", compute_args.gt, "ground-truth box \"cx,cy,w,h\"")
      ->required();
  compute->add_flag("--corners", compute_args.corners,
                    "interpret boxes as \"x1,y1,x2,y2\" corners");
  add_spec_options(compute, compute_args.spec, true);
  compute->add_option("--conf", compute_args.conf, "prediction confidence in [0,1]")
      ->capture_default_str();
  compute->add_option("--epoch", compute_args.epoch, "epoch driving the schedule")
      ->capture_default_str();

  CurveArgs curve_args;
  CLI::App* curve = app.add_subcommand(
      "curve", "sweep a box copy along an axis, tabulate IoU per scaling ratio");
  curve->add_option("--box", curve_args.box, "swept box \"cx,cy,w,h\"")
      ->capture_default_str();
  curve->add_flag("--corners", curve_args.corners,
                  "interpret the box as \"x1,y1,x2,y2\" corners");
  curve->add_option("--axis", curve_args.axis, "sweep axis: x|y|diag")
      ->capture_default_str();
  curve->add_option("--from", curve_args.from, "first sweep distance")
      ->capture_default_str();
  curve->add_option("--to", curve_args.to, "last sweep distance")
      ->capture_default_str();
  curve->add_option("--steps", curve_args.steps, "number of samples (>= 2)")
      ->capture_default_str();
  curve->add_option("--ratios", curve_args.ratios, "scaling ratios, one column each")
      ->delimiter(',')
      ->capture_default_str();
  curve->add_option("--out", curve_args.out_dir, "write curve.<format> here");
  curve->add_option("--format", curve_args.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  ScheduleArgs schedule_args;
  CLI::App* schedule = app.add_subcommand(
      "schedule", "tabulate the box-scaling ratio per epoch for a strategy");
  schedule->add_option("--strategy", schedule_args.strategy,
                       "linear|cos|fraction|constant")
      ->capture_default_str();
  schedule->add_option("--start", schedule_args.start, "ratio at epoch 0")
      ->capture_default_str();
  schedule->add_option("--end", schedule_args.end, "ratio at the last epoch")
      ->capture_default_str();
  schedule->add_option("--epochs", schedule_args.epochs, "last epoch of the table")
      ->capture_default_str();
  schedule->add_option("--value", schedule_args.value,
                       "ratio used by the constant strategy")
      ->capture_default_str();
  schedule->add_option("--out", schedule_args.out_dir, "write schedule.<format> here");
  schedule->add_option("--format", schedule_args.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  GradCheckArgs gradcheck_args;
  CLI::App* gradcheck = app.add_subcommand(
      "gradcheck", "compare analytic gradients against the finite-difference "
                   "oracle on random pairs; exit 0 iff pass rate >= 0.95");
  add_spec_options(gradcheck, gradcheck_args.spec, false);
  gradcheck->add_option("--trials", gradcheck_args.trials, "number of sampled pairs")
      ->capture_default_str();
  gradcheck->add_option("--seed", gradcheck_args.seed, "sampling seed")
      ->capture_default_str();
  gradcheck->add_option("--tol", gradcheck_args.tol, "relative error tolerance")
      ->capture_default_str();
  gradcheck->add_flag("--serial", gradcheck_args.serial, "disable parallel trials");
  gradcheck->add_option("--out", gradcheck_args.out_dir, "write gradcheck.json here");

  SimulateArgs simulate_args;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "run a campaign config: per-run series files plus a comparison "
                  "table in the output directory");
  CLI::Option* cfg_opt =
      simulate->add_option("--config", simulate_args.config_file, "campaign JSON file")
          ->check(CLI::ExistingFile);
  simulate->add_option("--preset", simulate_args.preset,
                       "built-in campaign: fig4-desk|ablation-desk")
      ->excludes(cfg_opt);
  simulate->add_option("--out", simulate_args.out_dir, "override the output directory");
  simulate->add_option("--format", simulate_args.format, "restrict outputs to csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  simulate->add_flag("--serial", simulate_args.serial, "disable parallel anchors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(compute)) return run_compute(compute_args);
    if (app.got_subcommand(curve)) return run_curve(curve_args);
    if (app.got_subcommand(schedule)) return run_schedule(schedule_args);
    if (app.got_subcommand(gradcheck)) return run_gradcheck(gradcheck_args);
    if (app.got_subcommand(simulate)) {
      if (simulate_args.config_file.empty() && simulate_args.preset.empty()) {
        throw std::invalid_argument("simulate: pass --config FILE or --preset NAME");
      }
      return run_simulate(simulate_args);
    }
    throw std::invalid_argument("no subcommand selected");
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
