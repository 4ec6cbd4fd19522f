#include "camplace/objective.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace camplace {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

constexpr double kAngleTol = 1e-12;
constexpr double kPositionTol = 1e-9;

}  // namespace

double dist_facets_facets(std::span<const Facet> a, std::span<const Facet> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("distance between facet sets needs non-empty sets");
  std::vector<Box> bb(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) bb[j] = bounding_box(b.subspan(j, 1));
  double best = std::numeric_limits<double>::infinity();
  for (const auto& fa : a) {
    const Box ba = bounding_box(std::span<const Facet>(&fa, 1));
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (box_box_distance(ba, bb[j]) >= best) continue;
      best = std::min(best, triangle_triangle_distance(fa, b[j]));
      if (best == 0) return 0;
    }
  }
  return best;
}

double dist_facets_voxels(std::span<const Facet> c, const VoxelGrid& g, const VoxelMask& model) {
  if (c.empty()) throw std::invalid_argument("distance to the model needs critical facets");
  if (model.size() != g.size()) throw std::invalid_argument("model does not match the voxel grid");

  std::vector<Box> fb(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) fb[j] = bounding_box(c.subspan(j, 1));
  const Box all = bounding_box(c);

  // visit voxels by a lower bound and stop once the bound passes the best
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t v = 0; v < model.size(); ++v)
    if (model[v]) order.emplace_back(box_box_distance(g.voxel_box(v), all), v);
  if (order.empty()) return g.bounds().diagonal();
  std::sort(order.begin(), order.end());

  double best = std::numeric_limits<double>::infinity();
  for (const auto& [lb, v] : order) {
    if (lb >= best) break;
    const Box vb = g.voxel_box(v);
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (box_box_distance(vb, fb[j]) >= best) continue;
      best = std::min(best, box_triangle_distance(vb, c[j]));
      if (best == 0) return 0;
    }
  }
  return best;
}

Evaluator::Evaluator(const Scenario& s, SamplingMode mode)
    : s_(s), grid_(s), mode_(mode), placement_(placement_box(s)), samples_(sample_points(grid_, mode)) {
  const int H = s.time_step_count(), L = s.event_count();
  for (int h = 1; h <= H; ++h) {
    const auto objs = obstacle_objects_at(s, h);
    obstacles_.push_back(CulledFacets::from_objects(objs));
    interior_.push_back(s.rigid_exclusion ? rigid_interior_mask(grid_, mode, objs) : VoxelMask(grid_.size(), 0));
    critical_.push_back(critical_facets(s, h));
  }
  const double cap = s.surveillance.diagonal();
  for (int h = 1; h <= H; ++h) {
    for (int l = 1; l <= L; ++l) {
      const auto& objs = target_objects(s, l, h);
      targets_.push_back(CulledFacets::from_objects(objs));
      const auto tf = target_facets(s, l, h);
      const auto& cf = critical_[h - 1];
      target_empty_.push_back(tf.empty());
      d_true_.push_back(cf.empty() ? 0.0 : (tf.empty() ? cap : dist_facets_facets(cf, tf)));
    }
  }
}

void Evaluator::check_settings(std::span<const CameraSetting> settings) const {
  const auto& d = s_.domain;
  for (std::size_t i = 0; i < settings.size(); ++i) {
    const auto& e = settings[i];
    const bool ok = e.position.finite() && placement_.contains(e.position, kPositionTol) &&
                    e.yaw >= d.yaw_min - kAngleTol && e.yaw <= d.yaw_max + kAngleTol &&
                    e.pitch >= d.pitch_min - kAngleTol && e.pitch <= d.pitch_max + kAngleTol;
    if (!ok) throw std::invalid_argument("camera setting " + std::to_string(i + 1) + " leaves the placement domain");
  }
}

ModelSnapshot Evaluator::model_at(std::span<const CameraSetting> settings, int l, int h) const {
  check_settings(settings);
  if (l < 1 || l > s_.event_count() || h < 1 || h > s_.time_step_count())
    throw std::out_of_range("event/time index out of range");
  ModelSnapshot snap;
  for (const auto& e : settings) {
    const auto view = prepare_view(samples_, e, s_.intrinsics, obstacles_[h - 1]);
    snap.free_masks.push_back(free_mask(grid_, mode_, samples_, view, s_.intrinsics, targets_[index(l, h)]));
  }
  snap.hull = build_model(grid_, snap.free_masks);
  VoxelMask m = snap.hull;
  const auto& inside = interior_[h - 1];
  for (std::size_t v = 0; v < m.size(); ++v)
    if (inside[v]) m[v] = 0;
  const auto clusters = cluster_model(grid_, m);
  snap.model = apply_plausibility(grid_, clusters, s_.plausibility.min_volume, s_.plausibility.min_height);
  return snap;
}

ErrValue Evaluator::evaluate(std::span<const CameraSetting> settings, std::optional<double> early_abort_threshold) const {
  check_settings(settings);
  ErrValue out;
  const int H = s_.time_step_count(), L = s_.event_count();
  const double cap = s_.surveillance.diagonal();
  std::vector<CameraView> views(settings.size());
  std::vector<VoxelMask> masks(settings.size());

  for (int h = 1; h <= H; ++h) {
    auto t0 = Clock::now();
    for (std::size_t i = 0; i < settings.size(); ++i)
      views[i] = prepare_view(samples_, settings[i], s_.intrinsics, obstacles_[h - 1]);
    out.timing.classify_ms += ms_since(t0);

    for (int l = 1; l <= L; ++l) {
      const std::size_t idx = index(l, h);
      DistanceReport r;
      r.l = l;
      r.h = h;
      r.weight = s_.events[l - 1].weights[h - 1];
      r.d_true = d_true_[idx];

      if (critical_[h - 1].empty()) {
        // no critical points at this instant: nothing to measure
        out.terms.push_back(r);
        continue;
      }

      t0 = Clock::now();
      for (std::size_t i = 0; i < settings.size(); ++i)
        masks[i] = free_mask(grid_, mode_, samples_, views[i], s_.intrinsics, targets_[idx]);
      VoxelMask model = build_model(grid_, masks);
      const auto& inside = interior_[h - 1];
      for (std::size_t v = 0; v < model.size(); ++v)
        if (inside[v]) model[v] = 0;
      out.timing.classify_ms += ms_since(t0);

      t0 = Clock::now();
      const auto clusters = cluster_model(grid_, model);
      model = apply_plausibility(grid_, clusters, s_.plausibility.min_volume, s_.plausibility.min_height);
      out.timing.cluster_ms += ms_since(t0);

      t0 = Clock::now();
      if (count(model) == 0) {
        r.d_model = cap;
        r.capped = true;
        ++out.cap_uses;
      } else {
        r.d_model = dist_facets_voxels(critical_[h - 1], grid_, model);
      }
      out.timing.distance_ms += ms_since(t0);

      const double diff = r.d_true - r.d_model;
      r.term = r.weight * diff * diff;
      out.total += r.term;
      out.terms.push_back(r);
      if (early_abort_threshold && out.total > *early_abort_threshold) {
        out.aborted = true;
        return out;
      }
    }
  }
  return out;
}

std::size_t Evaluator::storage_bytes() const {
  std::size_t bytes = samples_.size() * sizeof(Vec3);
  for (const auto& m : interior_) bytes += m.size();
  // per evaluation: one view (state + t_obs) and one mask per camera, plus the model
  const std::size_t n = static_cast<std::size_t>(s_.camera_count);
  bytes += n * samples_.size() * (sizeof(std::uint8_t) + sizeof(double)) + (n + 1) * grid_.size();
  for (const auto& c : obstacles_) bytes += c.facets.size() * sizeof(Facet);
  for (const auto& c : targets_) bytes += c.facets.size() * sizeof(Facet);
  return bytes;
}

ErrValue err_sum(const Scenario& s, std::span<const CameraSetting> settings, std::optional<double> early_abort_threshold,
                 SamplingMode mode) {
  return Evaluator(s, mode).evaluate(settings, early_abort_threshold);
}

}  // namespace camplace
