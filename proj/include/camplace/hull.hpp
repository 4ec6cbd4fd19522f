// Voxelised visual hull: per-camera free masks over the surveillance grid,
// the model as the complement of their union, and cluster-level filtering.
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "camplace/geometry.hpp"
#include "camplace/scene.hpp"
#include "camplace/visibility.hpp"

namespace camplace {

/// One byte per voxel; nonzero means set.
using VoxelMask = std::vector<std::uint8_t>;

struct VoxelIndex {
  int i{0}, j{0}, k{0};
  bool operator==(const VoxelIndex&) const = default;
};

class VoxelGrid {
 public:
  VoxelGrid(const Box& bounds, VoxelResolution res);
  explicit VoxelGrid(const Scenario& s) : VoxelGrid(s.surveillance, s.resolution) {}

  const Box& bounds() const { return bounds_; }
  VoxelResolution dims() const { return res_; }
  Vec3 cell() const { return cell_; }
  std::size_t size() const { return static_cast<std::size_t>(res_.nx) * res_.ny * res_.nz; }
  double cell_volume() const { return cell_.x * cell_.y * cell_.z; }
  double cell_diagonal() const { return cell_.norm(); }

  bool in_range(const VoxelIndex& v) const;
  std::size_t flat(const VoxelIndex& v) const;
  VoxelIndex unflat(std::size_t idx) const;

  /// Throws std::out_of_range for indices outside the grid.
  Vec3 center(const VoxelIndex& v) const;
  Vec3 center(std::size_t idx) const { return center(unflat(idx)); }
  Box voxel_box(std::size_t idx) const;
  /// Lattice corner (ci, cj, ck) with 0 <= ci <= nx etc.
  Vec3 corner(int ci, int cj, int ck) const;

 private:
  Box bounds_;
  VoxelResolution res_;
  Vec3 cell_;
};

enum class SamplingMode { center, conservative9 };

std::string to_string(SamplingMode m);
SamplingMode sampling_mode_from_string(const std::string& s);

Vec3 voxel_center(const VoxelGrid& g, const VoxelIndex& idx);

/// Sample points used by a sampling mode: the voxel centers, followed (in
/// conservative9 mode) by the (nx+1)(ny+1)(nz+1) lattice corners.
std::vector<Vec3> sample_points(const VoxelGrid& g, SamplingMode mode);

/// Facet set with per-object bounding spheres for ray culling.
struct CulledFacets {
  std::vector<Facet> facets;
  std::vector<Sphere> spheres;
  /// [begin, end) facet range of each object.
  std::vector<std::pair<std::size_t, std::size_t>> ranges;

  static CulledFacets from_objects(std::span<const MeshObject> objects);

  /// Same result as first_hit() over all facets.
  double first_hit_t(const Vec3& origin, const Vec3& dir) const;
  /// True if some facet is hit at t < t_max.
  bool any_hit_before(const Vec3& origin, const Vec3& dir, double t_max, double* t_hit) const;
};

/// Occlusion state of every sample point for one camera at one time step.
/// Independent of the appearance event, so it is shared by all events.
struct CameraView {
  CameraSetting camera;
  /// 0 = outside cone, 1 = occluded by an obstacle, 2 = visible.
  std::vector<std::uint8_t> state;
  /// Obstacle hit parameter along p - position (infinity if none).
  std::vector<double> t_obs;
};

CameraView prepare_view(const std::vector<Vec3>& samples, const CameraSetting& e, const CameraIntrinsics& intr,
                        const CulledFacets& obstacles);

/// Per-voxel free flags from a prepared view and the target set.
VoxelMask free_mask(const VoxelGrid& g, SamplingMode mode, const std::vector<Vec3>& samples,
                    const CameraView& view, const CameraIntrinsics& intr, const CulledFacets& targets);

/// Free mask of one camera for event l at step h.
VoxelMask classify_grid(const VoxelGrid& g, const CameraSetting& e, const Scenario& s, int l, int h,
                        SamplingMode mode = SamplingMode::center);

/// Voxels no camera sees as free. With no masks every voxel is in the model.
VoxelMask build_model(const VoxelGrid& g, std::span<const VoxelMask> free_masks);

/// Voxels inside a rigid obstacle. Center mode tests the center; conservative9
/// requires every sample of the voxel to lie inside the same object.
VoxelMask rigid_interior_mask(const VoxelGrid& g, SamplingMode mode, std::span<const MeshObject> obstacles);

struct Cluster {
  std::vector<std::size_t> voxels;
  double volume{0};
  double height{0};
};

/// Maximal face-connected components, ordered by their smallest voxel index.
std::vector<Cluster> cluster_model(const VoxelGrid& g, const VoxelMask& model);

VoxelMask apply_plausibility(const VoxelGrid& g, std::span<const Cluster> clusters, double min_volume,
                             double min_height);

std::size_t count(const VoxelMask& m);

/// Writes "i,j,k,label" rows; label is "model" or the number of cameras
/// that see the voxel as free.
void dump_voxels(std::ostream& out, const VoxelGrid& g, std::span<const VoxelMask> free_masks,
                 const VoxelMask& model);

}  // namespace camplace
