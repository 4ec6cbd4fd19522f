// Archive-based stochastic sampler over the 5n-dimensional box of camera
// settings. Candidates are drawn around rank-weighted archive members with
// Gaussian kernels whose width shrinks while the archive stagnates.
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "camplace/objective.hpp"
#include "camplace/scene.hpp"
#include "camplace/visibility.hpp"

namespace camplace {

using SettingsTuple = std::vector<CameraSetting>;

struct SolverConfig {
  int archive_size{12};
  int samples_per_iteration{8};
  /// Multiplicative kernel-width decay applied after an iteration in which
  /// no candidate entered the archive.
  double shrink{0.85};
  /// Kernel width as a fraction of each coordinate's range.
  double initial_width{0.3};
  double width_floor{1e-3};
  double restart_probability{0.05};
  /// After this many consecutive iterations without an archive entry the
  /// width is reset to initial_width (0 disables the reset).
  int stall_reset{30};
  std::uint64_t seed{0};
  bool early_abort{false};
  /// Worker threads for candidate evaluation; 1 evaluates sequentially.
  int threads{1};

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

struct StopCriteria {
  std::optional<double> tolerance;
  std::optional<double> time_limit_s;
  std::optional<long> max_iterations;

  void validate() const;
};

/// Tolerance = squared voxel diagonal, 10 minute limit.
StopCriteria default_stop_criteria(const Scenario& s);

enum class StopReason { none, tolerance, time, iterations, exhausted };

std::string to_string(StopReason r);

/// Tolerance first (best <= tolerance), then wall clock, then iterations.
StopReason check_stop(double best_err, long iteration, double elapsed_s, const StopCriteria& stop);

struct TraceRow {
  long iteration{0};
  double best_err{0};
  EvalTiming timing;
  double kernel_width{0};
  int evaluations{0};
  int aborted{0};
};

struct SolverTrace {
  std::vector<TraceRow> rows;
};

/// Columns: iteration,best_err_m2,eval_ms_classify,eval_ms_cluster,
/// eval_ms_distance,kernel_width. Without timing the three ms columns read NA.
void write_trace_csv(std::ostream& out, const SolverTrace& trace, bool include_timing = true);

/// Box of admissible values for every coordinate (x, y, z, yaw, pitch per camera).
class SearchSpace {
 public:
  explicit SearchSpace(const Scenario& s);

  int cameras() const { return n_; }
  std::size_t dimension() const { return lo_.size(); }
  double lo(std::size_t d) const { return lo_[d]; }
  double hi(std::size_t d) const { return hi_[d]; }
  /// Yaw wraps around when the domain allows the full [-pi, pi] circle.
  bool periodic(std::size_t d) const { return periodic_[d]; }

  std::vector<double> encode(const SettingsTuple& t) const;
  SettingsTuple decode(const std::vector<double>& x) const;
  /// Wraps periodic coordinates and clamps the rest into bounds.
  double fold(std::size_t d, double v) const;
  bool contains(const SettingsTuple& t) const;

  SettingsTuple uniform(std::mt19937_64& rng) const;

 private:
  int n_;
  std::vector<double> lo_, hi_;
  std::vector<bool> periodic_;
};

struct Candidate {
  SettingsTuple settings;
  double err{0};
};

/// K uniformly sampled tuples, evaluated and sorted by Err (stable). With no
/// cameras the single empty tuple is evaluated once.
std::vector<Candidate> initial_population(const Evaluator& ev, const SearchSpace& space, const SolverConfig& cfg,
                                          std::mt19937_64& rng, EvalTiming* timing = nullptr);

/// Draws one candidate around a rank-weighted archive member; with
/// probability restart_probability it is a uniform sample instead.
SettingsTuple sample_candidate(const std::vector<Candidate>& archive, const SearchSpace& space,
                               const SolverConfig& cfg, double kernel_width, std::mt19937_64& rng);

/// Index of the archive member chosen by rank weights (K - j for 0-based rank j).
std::size_t pick_rank(std::size_t archive_size, std::mt19937_64& rng);

struct SolverResult {
  SettingsTuple best;
  double best_err{0};
  StopReason reason{StopReason::none};
  long iterations{0};
  long evaluations{0};
  double wall_s{0};
  int cap_uses{0};
  SolverTrace trace;
};

using ProgressFn = std::function<void(const TraceRow&)>;

SolverResult optimize(const Evaluator& ev, const SolverConfig& cfg, const StopCriteria& stop,
                      const ProgressFn& progress = {});

}  // namespace camplace
