// camplace_cli: optimize camera placements, run parameter sweeps, and fold
// sweep CSVs into summary tables.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "camplace/harness.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace camplace;

namespace {

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::optional<double> time_limit_s;
  std::optional<double> tolerance;
  std::optional<long> max_iters;
  std::string sampling_mode{"center"};
  bool early_abort{false};
  bool normalize{false};
  int threads{1};
  std::string out{"."};
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--seed", f.seed, "RNG seed (optimize: defaults to the scenario seed; sweep: master seed)");
  app->add_option("--time-limit-s", f.time_limit_s, "Wall-clock limit per run in seconds (default 600)");
  app->add_option("--tolerance", f.tolerance, "Err tolerance in m^2 (default: squared voxel diagonal)");
  app->add_option("--max-iters", f.max_iters, "Iteration limit per run");
  app->add_option("--sampling-mode", f.sampling_mode, "Voxel sampling: center or conservative9")
      ->check(CLI::IsMember({"center", "conservative9"}));
  app->add_flag("--early-abort", f.early_abort, "Stop summing Err once a candidate is worse than the archive");
  app->add_flag("--normalize-weights", f.normalize, "Rescale event weights to sum to 1");
  app->add_option("--threads", f.threads, "Worker threads for candidate evaluation")->check(CLI::PositiveNumber);
  app->add_option("--out", f.out, "Output directory");
}

StopCriteria stop_from(const CommonFlags& f, const Scenario& s) {
  StopCriteria stop;
  stop.tolerance = f.tolerance ? *f.tolerance : squared_voxel_diagonal(s);
  stop.time_limit_s = f.time_limit_s ? *f.time_limit_s : 600.0;
  if (f.max_iters) stop.max_iterations = *f.max_iters;
  return stop;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

nlohmann::json settings_json(const Scenario& s, const SettingsTuple& best) {
  nlohmann::json cams = nlohmann::json::parse(serialize_scenario(s)).at("cameras");
  auto arr = nlohmann::json::array();
  for (const auto& e : best)
    arr.push_back({{"position", {e.position.x, e.position.y, e.position.z}}, {"yaw", e.yaw}, {"pitch", e.pitch}});
  cams["settings"] = arr;
  return {{"cameras", cams}};
}

int run_optimize(const std::string& scenario, const CommonFlags& f, bool no_timing, bool dump) {
  Scenario s = resolve_scenario(scenario);
  if (f.normalize) normalize_weights(s);
  const Evaluator ev(s, sampling_mode_from_string(f.sampling_mode));
  SolverConfig cfg;
  cfg.seed = f.seed ? *f.seed : s.seed;
  cfg.early_abort = f.early_abort;
  cfg.threads = f.threads;
  const StopCriteria stop = stop_from(f, s);

  fs::create_directories(f.out);
  const SolverResult res = optimize(ev, cfg, stop);

  open_out(fs::path(f.out) / "best_settings.json") << settings_json(s, res.best).dump(2) << '\n';
  {
    auto out = open_out(fs::path(f.out) / "trace.csv");
    write_trace_csv(out, res.trace, !no_timing);
  }
  if (dump) {
    for (int h = 1; h <= s.time_step_count(); ++h)
      for (int l = 1; l <= s.event_count(); ++l) {
        const auto snap = ev.model_at(res.best, l, h);
        auto out = open_out(fs::path(f.out) / ("voxels_l" + std::to_string(l) + "_h" + std::to_string(h) + ".csv"));
        dump_voxels(out, ev.grid(), snap.free_masks, snap.model);
      }
  }

  std::ostringstream line;
  line.precision(10);
  line << "stop_reason=" << to_string(res.reason) << " best_err_m2=" << res.best_err
       << " tolerance_m2=" << (stop.tolerance ? *stop.tolerance : 0) << " iterations=" << res.iterations
       << " evaluations=" << res.evaluations << " wall_s=" << res.wall_s << " cap_uses=" << res.cap_uses
       << " seed=" << cfg.seed;
  std::cout << line.str() << '\n';
  open_out(fs::path(f.out) / "summary.txt") << line.str() << '\n';
  return res.reason == StopReason::tolerance ? 0 : 2;
}

int run_sweep_cmd(const std::string& base_name, const std::string& axis, const std::vector<std::string>& values,
                  int reps, const CommonFlags& f) {
  const Scenario base = resolve_scenario(base_name);
  SweepSpec spec;
  spec.axis = sweep_axis_from_string(axis);
  for (const auto& v : values)
    if (!v.empty()) spec.values.push_back(v);
  spec.repetitions = reps;
  spec.validate();

  SweepOptions opts;
  opts.mode = sampling_mode_from_string(f.sampling_mode);
  opts.normalize_weights = f.normalize;
  opts.master_seed = f.seed ? *f.seed : base.seed;
  opts.solver.early_abort = f.early_abort;
  opts.solver.threads = f.threads;
  if (f.tolerance) opts.stop.tolerance = *f.tolerance;
  opts.stop.time_limit_s = f.time_limit_s ? *f.time_limit_s : 600.0;
  if (f.max_iters) opts.stop.max_iterations = *f.max_iters;
  fs::create_directories(f.out);
  const auto records = run_sweep(base, spec, opts, &std::cerr);
  const fs::path csv = fs::path(f.out) / ("sweep_" + axis + ".csv");
  auto out = open_out(csv);
  write_records_csv(out, records);
  std::cout << "wrote " << records.size() << " records to " << csv.string() << '\n';
  return 0;
}

int run_report(const std::vector<std::string>& paths, const std::string& out_dir, const std::string& svg,
               double tolerance) {
  std::vector<GroupSummary> all;
  for (const auto& p : paths) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot read " + p);
    const auto groups = summarize(fs::path(p).stem().string(), read_records_csv(in));
    all.insert(all.end(), groups.begin(), groups.end());
  }
  write_summary_table(std::cout, all);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    auto out = open_out(fs::path(out_dir) / "summary.csv");
    write_summary_table(out, all);
  }
  if (!svg.empty()) {
    auto out = open_out(svg);
    write_summary_svg(out, all, tolerance);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Camera placement optimizer for voxel-based human/robot surveillance"};
  app.require_subcommand(1);

  CommonFlags opt_flags;
  std::string opt_scenario;
  bool no_timing = false, dump = false;
  auto* opt = app.add_subcommand("optimize", "Optimize one scenario (file path or preset name)");
  opt->add_option("scenario", opt_scenario, "Scenario JSON file or preset (base_setup, line_search)")->required();
  add_common(opt, opt_flags);
  opt->add_flag("--no-timing", no_timing, "Write NA in the trace timing columns");
  opt->add_flag("--dump-voxels", dump, "Write per-(event, step) voxel labels of the best tuple");

  CommonFlags sw_flags;
  std::string sw_base, sw_axis;
  std::vector<std::string> sw_values;
  int sw_reps = 5;
  auto* sw = app.add_subcommand("sweep", "Run one parameter sweep and write run records");
  sw->add_option("base", sw_base, "Base scenario file or preset")->required();
  sw->add_option("--axis", sw_axis, "Parameter axis")->required();
  sw->add_option("--values", sw_values, "Comma-separated values")->required()->delimiter(',');
  sw->add_option("--repetitions", sw_reps, "Runs per value")->check(CLI::PositiveNumber);
  add_common(sw, sw_flags);

  std::vector<std::string> rep_paths;
  std::string rep_out, rep_svg;
  double rep_tol = 0.1875;
  auto* rep = app.add_subcommand("report", "Aggregate run-record CSVs");
  rep->add_option("csv", rep_paths, "Run-record CSV files")->required();
  rep->add_option("--out", rep_out, "Directory for summary.csv");
  rep->add_option("--svg", rep_svg, "Write an SVG chart to this path");
  rep->add_option("--tolerance", rep_tol, "Tolerance line drawn in the chart");

  std::string pre_name, pre_out;
  auto* pre = app.add_subcommand("preset", "Write a preset scenario as JSON");
  pre->add_option("name", pre_name, "base_setup or line_search")->required();
  pre->add_option("--out", pre_out, "Output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*opt) return run_optimize(opt_scenario, opt_flags, no_timing, dump);
    if (*sw) return run_sweep_cmd(sw_base, sw_axis, sw_values, sw_reps, sw_flags);
    if (*rep) return run_report(rep_paths, rep_out, rep_svg, rep_tol);
    if (*pre) {
      const auto s = preset(pre_name);
      if (!s) throw std::invalid_argument("unknown preset '" + pre_name + "'");
      if (pre_out.empty())
        std::cout << serialize_scenario(*s) << '\n';
      else
        open_out(pre_out) << serialize_scenario(*s) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
