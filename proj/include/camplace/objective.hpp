// Distances between critical points, targets and the voxel model, and the
// weighted error sum over appearance events and time steps.
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "camplace/hull.hpp"
#include "camplace/scene.hpp"
#include "camplace/visibility.hpp"

namespace camplace {

struct DistanceReport {
  int l{0}, h{0};
  double weight{0};
  double d_true{0};
  double d_model{0};
  double term{0};
  /// The model was empty and d_model was capped at diam(S).
  bool capped{false};
};

struct EvalTiming {
  double classify_ms{0};
  double cluster_ms{0};
  double distance_ms{0};

  double total_ms() const { return classify_ms + cluster_ms + distance_ms; }
  EvalTiming& operator+=(const EvalTiming& o) {
    classify_ms += o.classify_ms;
    cluster_ms += o.cluster_ms;
    distance_ms += o.distance_ms;
    return *this;
  }
};

struct ErrValue {
  double total{0};
  /// Terms in summation order (h outer, l inner).
  std::vector<DistanceReport> terms;
  /// Summation stopped once the running total exceeded the threshold;
  /// total is then a lower bound of the full sum.
  bool aborted{false};
  int cap_uses{0};
  EvalTiming timing;
};

/// Exact minimum distance between two non-empty triangle sets.
double dist_facets_facets(std::span<const Facet> a, std::span<const Facet> b);

/// Minimum distance between the triangle set and the closed boxes of the
/// model voxels; diam(S) when the model is empty.
double dist_facets_voxels(std::span<const Facet> c, const VoxelGrid& g, const VoxelMask& model);

/// Model of event l at step h after rigid exclusion and plausibility checks,
/// together with the per-camera free masks it was built from.
struct ModelSnapshot {
  std::vector<VoxelMask> free_masks;
  VoxelMask hull;
  VoxelMask model;
};

/// Caches everything that does not depend on the camera settings.
class Evaluator {
 public:
  explicit Evaluator(const Scenario& s, SamplingMode mode = SamplingMode::center);

  const Scenario& scenario() const { return s_; }
  const VoxelGrid& grid() const { return grid_; }
  SamplingMode mode() const { return mode_; }

  /// Throws std::invalid_argument if a setting leaves the placement domain.
  void check_settings(std::span<const CameraSetting> settings) const;

  ErrValue evaluate(std::span<const CameraSetting> settings,
                    std::optional<double> early_abort_threshold = std::nullopt) const;

  ModelSnapshot model_at(std::span<const CameraSetting> settings, int l, int h) const;

  /// d(C(t_h), O_u(a_l(t_h))), precomputed.
  double true_distance(int l, int h) const { return d_true_[index(l, h)]; }

  /// Bytes held by the cached sample and mask storage.
  std::size_t storage_bytes() const;

 private:
  std::size_t index(int l, int h) const {
    return static_cast<std::size_t>(h - 1) * s_.event_count() + static_cast<std::size_t>(l - 1);
  }

  Scenario s_;
  VoxelGrid grid_;
  SamplingMode mode_;
  Box placement_;
  std::vector<Vec3> samples_;
  std::vector<CulledFacets> obstacles_;   // per h
  std::vector<VoxelMask> interior_;       // per h
  std::vector<std::vector<Facet>> critical_;  // per h
  std::vector<CulledFacets> targets_;     // per (l, h)
  std::vector<double> d_true_;            // per (l, h)
  std::vector<bool> target_empty_;        // per (l, h)
};

/// Err_{L,H}(e_1..e_n) of the scenario.
ErrValue err_sum(const Scenario& s, std::span<const CameraSetting> settings,
                 std::optional<double> early_abort_threshold = std::nullopt,
                 SamplingMode mode = SamplingMode::center);

}  // namespace camplace
