// Scenario presets, procedural object generation and the experiment sweep /
// report machinery behind the command-line tool.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "camplace/scene.hpp"
#include "camplace/solver.hpp"

namespace camplace {

std::vector<Facet> tetra_facets(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);
std::vector<Facet> box_facets(const Box& b);

/// Surveillance cuboid 4 x 3 x 3 m at 16 x 12 x 12 voxels, two static
/// tetrahedra, a three-part robot over two time steps, three appearance
/// events of two box-shaped targets each, six cameras anywhere in S.
Scenario base_setup();

/// One camera sliding on a segment under the ceiling with fixed orientation,
/// one box target, a 4 x 3 x 3 grid.
Scenario line_search_setup();

/// Names accepted by preset(): base_setup, line_search.
std::optional<Scenario> preset(const std::string& name);

/// Loads a preset by name or a scenario file by path.
Scenario resolve_scenario(const std::string& name_or_path);

class InfeasiblePlacement : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Places axis-aligned boxes (12 facets) and tetrahedra (4 facets) by
/// rejection sampling inside a region, away from a set of existing objects.
class ObjectGenerator {
 public:
  ObjectGenerator(const Box& region, std::uint64_t seed, int max_attempts = 100);

  /// facet_count = 12 * boxes + 4 * tetrahedra. Shapes are spread round-robin
  /// over object_count objects. Throws InfeasiblePlacement.
  std::vector<MeshObject> make_objects(const std::string& prefix, int object_count, int boxes, int tetrahedra,
                                       const std::vector<MeshObject>& avoid);

  /// Splits a facet count into (boxes, tetrahedra) using as many boxes as
  /// possible while keeping at least min_shapes shapes.
  static std::pair<int, int> split_facets(int facet_count, int min_shapes);

 private:
  std::vector<Facet> random_shape(bool box);

  Box region_;
  std::mt19937_64 rng_;
  int max_attempts_;
};

enum class SweepAxis {
  voxel_resolution,
  static_facets,
  dynamic_facets,
  dynamic_objects,
  target_facets,
  target_objects,
  time_steps,
  events,
  camera_count,
  placement_domain
};

std::string to_string(SweepAxis a);
SweepAxis sweep_axis_from_string(const std::string& s);

struct SweepSpec {
  SweepAxis axis{SweepAxis::camera_count};
  std::vector<std::string> values;
  int repetitions{5};

  void validate() const;
};

/// Builds the scenario for one sweep value. Throws InfeasiblePlacement when
/// random placement fails, ValidationError/std::invalid_argument otherwise.
Scenario apply_sweep_value(const Scenario& base, SweepAxis axis, const std::string& value, std::uint64_t scene_seed);

struct RunRecord {
  std::string value;
  std::uint64_t seed{0};
  double final_err{0};
  long iterations{0};
  double wall_time_s{0};
  double mean_classify_ms{0};
  double mean_cluster_ms{0};
  double mean_distance_ms{0};
  std::string stop_reason;
  std::size_t mem_estimate_bytes{0};
  std::size_t peak_rss_bytes{0};
  bool failed{false};
};

struct SweepOptions {
  SolverConfig solver;
  StopCriteria stop;
  SamplingMode mode{SamplingMode::center};
  bool normalize_weights{false};
  std::uint64_t master_seed{0};
};

/// Runs every value x repetition in order and returns the records. An unset
/// tolerance defaults to the squared voxel diagonal of each generated scene,
/// an unset time and iteration limit to the default time limit.
std::vector<RunRecord> run_sweep(const Scenario& base, const SweepSpec& spec, const SweepOptions& opts,
                                 std::ostream* log = nullptr);

/// Mean per-iteration evaluation time over iterations 2..I (iteration 1 is
/// the initial population), falling back to iteration 1 alone.
double mean_iteration_ms(const SolverTrace& trace, EvalTiming* parts = nullptr);

RunRecord make_record(const std::string& value, std::uint64_t seed, const SolverResult& res, const Evaluator& ev);

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_records_csv(std::istream& in);

struct GroupSummary {
  std::string source;
  std::string value;
  int runs{0};
  int failed{0};
  double success_rate{0};
  double mean_err{0};
  double median_err{0};
  double mean_iterations{0};
  double mean_wall_s{0};
  double mean_iteration_ms{0};
  std::vector<double> errs;
};

/// Groups records by value in first-appearance order. Failed runs count
/// towards `failed` only.
std::vector<GroupSummary> summarize(const std::string& source, const std::vector<RunRecord>& records);

void write_summary_table(std::ostream& out, const std::vector<GroupSummary>& groups);

/// Static SVG: success-rate bars and a final-Err scatter per group.
void write_summary_svg(std::ostream& out, const std::vector<GroupSummary>& groups, double tolerance);

/// Peak resident set size from /proc/self/status, 0 if unavailable.
std::size_t peak_rss_bytes();

}  // namespace camplace
