#include "camplace/hull.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace camplace {

VoxelGrid::VoxelGrid(const Box& bounds, VoxelResolution res) : bounds_(bounds), res_(res) {
  if (res.nx < 1 || res.ny < 1 || res.nz < 1) throw std::invalid_argument("voxel grid needs positive dimensions");
  const Vec3 e = bounds.extent();
  cell_ = {e.x / res.nx, e.y / res.ny, e.z / res.nz};
  if (!(cell_.x > 0 && cell_.y > 0 && cell_.z > 0)) throw std::invalid_argument("voxel grid needs a non-empty box");
}

bool VoxelGrid::in_range(const VoxelIndex& v) const {
  return v.i >= 0 && v.j >= 0 && v.k >= 0 && v.i < res_.nx && v.j < res_.ny && v.k < res_.nz;
}

std::size_t VoxelGrid::flat(const VoxelIndex& v) const {
  return static_cast<std::size_t>(v.i) + static_cast<std::size_t>(res_.nx) * (v.j + static_cast<std::size_t>(res_.ny) * v.k);
}

VoxelIndex VoxelGrid::unflat(std::size_t idx) const {
  const int i = static_cast<int>(idx % res_.nx);
  idx /= res_.nx;
  const int j = static_cast<int>(idx % res_.ny);
  return {i, j, static_cast<int>(idx / res_.ny)};
}

Vec3 VoxelGrid::center(const VoxelIndex& v) const {
  if (!in_range(v)) throw std::out_of_range("voxel index out of range");
  return {bounds_.lo.x + (v.i + 0.5) * cell_.x, bounds_.lo.y + (v.j + 0.5) * cell_.y,
          bounds_.lo.z + (v.k + 0.5) * cell_.z};
}

Vec3 VoxelGrid::corner(int ci, int cj, int ck) const {
  // the far lattice plane is pinned to the box so the grid tiles S exactly
  auto coord = [](double lo, double hi, double c, int i, int n) { return i == n ? hi : lo + i * c; };
  return {coord(bounds_.lo.x, bounds_.hi.x, cell_.x, ci, res_.nx), coord(bounds_.lo.y, bounds_.hi.y, cell_.y, cj, res_.ny),
          coord(bounds_.lo.z, bounds_.hi.z, cell_.z, ck, res_.nz)};
}

Box VoxelGrid::voxel_box(std::size_t idx) const {
  const VoxelIndex v = unflat(idx);
  return {corner(v.i, v.j, v.k), corner(v.i + 1, v.j + 1, v.k + 1)};
}

std::string to_string(SamplingMode m) { return m == SamplingMode::center ? "center" : "conservative9"; }

SamplingMode sampling_mode_from_string(const std::string& s) {
  if (s == "center") return SamplingMode::center;
  if (s == "conservative9") return SamplingMode::conservative9;
  throw std::invalid_argument("unknown sampling mode '" + s + "'");
}

Vec3 voxel_center(const VoxelGrid& g, const VoxelIndex& idx) { return g.center(idx); }

namespace {

std::size_t corner_flat(const VoxelGrid& g, int ci, int cj, int ck) {
  const auto d = g.dims();
  return static_cast<std::size_t>(ci) + static_cast<std::size_t>(d.nx + 1) * (cj + static_cast<std::size_t>(d.ny + 1) * ck);
}

// indices into sample_points() of the nine samples of voxel idx
std::array<std::size_t, 9> voxel_samples(const VoxelGrid& g, std::size_t idx) {
  const VoxelIndex v = g.unflat(idx);
  const std::size_t base = g.size();
  std::array<std::size_t, 9> out;
  out[0] = idx;
  for (int c = 0; c < 8; ++c)
    out[1 + c] = base + corner_flat(g, v.i + (c & 1), v.j + ((c >> 1) & 1), v.k + ((c >> 2) & 1));
  return out;
}

}  // namespace

std::vector<Vec3> sample_points(const VoxelGrid& g, SamplingMode mode) {
  std::vector<Vec3> pts;
  const auto d = g.dims();
  std::size_t total = g.size();
  if (mode == SamplingMode::conservative9) total += static_cast<std::size_t>(d.nx + 1) * (d.ny + 1) * (d.nz + 1);
  pts.reserve(total);
  for (std::size_t idx = 0; idx < g.size(); ++idx) pts.push_back(g.center(idx));
  if (mode == SamplingMode::conservative9)
    for (int k = 0; k <= d.nz; ++k)
      for (int j = 0; j <= d.ny; ++j)
        for (int i = 0; i <= d.nx; ++i) pts.push_back(g.corner(i, j, k));
  return pts;
}

CulledFacets CulledFacets::from_objects(std::span<const MeshObject> objects) {
  CulledFacets c;
  for (const auto& o : objects) {
    if (o.facets.empty()) continue;
    const std::size_t begin = c.facets.size();
    c.facets.insert(c.facets.end(), o.facets.begin(), o.facets.end());
    c.ranges.emplace_back(begin, c.facets.size());
    c.spheres.push_back(bounding_sphere(o.facets));
  }
  return c;
}

double CulledFacets::first_hit_t(const Vec3& origin, const Vec3& dir) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t o = 0; o < ranges.size(); ++o) {
    if (!ray_meets_sphere(origin, dir, spheres[o])) continue;
    for (std::size_t f = ranges[o].first; f < ranges[o].second; ++f)
      if (const auto t = ray_triangle(origin, dir, facets[f]); t && *t < best) best = *t;
  }
  return best;
}

bool CulledFacets::any_hit_before(const Vec3& origin, const Vec3& dir, double t_max, double* t_hit) const {
  for (std::size_t o = 0; o < ranges.size(); ++o) {
    if (!ray_meets_sphere(origin, dir, spheres[o])) continue;
    for (std::size_t f = ranges[o].first; f < ranges[o].second; ++f)
      if (const auto t = ray_triangle(origin, dir, facets[f]); t && *t < t_max) {
        if (t_hit) *t_hit = *t;
        return true;
      }
  }
  return false;
}

CameraView prepare_view(const std::vector<Vec3>& samples, const CameraSetting& e, const CameraIntrinsics& intr,
                        const CulledFacets& obstacles) {
  CameraView view;
  view.camera = e;
  view.state.assign(samples.size(), 0);
  view.t_obs.assign(samples.size(), std::numeric_limits<double>::infinity());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const Vec3& p = samples[s];
    if (!cone_contains(e, intr, p)) continue;
    const Vec3 dir = p - e.position;
    const double dp = dir.norm();
    if (dp == 0.0) {
      view.state[s] = 2;
      view.t_obs[s] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const double t_obs = obstacles.first_hit_t(e.position, dir);
    view.t_obs[s] = t_obs;
    view.state[s] = t_obs < 1.0 - kOcclusionEps / dp ? 1 : 2;
  }
  return view;
}

namespace {

bool sample_free(const Vec3& p, std::size_t s, const CameraView& view, const CameraIntrinsics& intr,
                 const CulledFacets& targets) {
  if (view.state[s] != 2) return false;
  const double t_obs = view.t_obs[s];
  if (std::isnan(t_obs)) return true;  // sample at the camera apex
  const Vec3 dir = p - view.camera.position;
  if (!intr.max_range) return !targets.any_hit_before(view.camera.position, dir, t_obs, nullptr);
  // with a range limit only the nearest target hit decides
  const double t = targets.first_hit_t(view.camera.position, dir);
  return !(t < t_obs && t * dir.norm() <= *intr.max_range);
}

}  // namespace

VoxelMask free_mask(const VoxelGrid& g, SamplingMode mode, const std::vector<Vec3>& samples, const CameraView& view,
                    const CameraIntrinsics& intr, const CulledFacets& targets) {
  VoxelMask mask(g.size(), 0);
  if (mode == SamplingMode::center) {
    for (std::size_t v = 0; v < g.size(); ++v) mask[v] = sample_free(samples[v], v, view, intr, targets);
    return mask;
  }
  // corner verdicts are shared between up to eight voxels
  const std::size_t n_samples = samples.size();
  std::vector<std::int8_t> verdict(n_samples, -1);
  auto free_at = [&](std::size_t s) {
    if (verdict[s] < 0) verdict[s] = sample_free(samples[s], s, view, intr, targets);
    return verdict[s] == 1;
  };
  for (std::size_t v = 0; v < g.size(); ++v) {
    bool all = true;
    for (std::size_t s : voxel_samples(g, v))
      if (!free_at(s)) {
        all = false;
        break;
      }
    mask[v] = all;
  }
  return mask;
}

VoxelMask classify_grid(const VoxelGrid& g, const CameraSetting& e, const Scenario& s, int l, int h,
                        SamplingMode mode) {
  const auto samples = sample_points(g, mode);
  const auto obstacles = CulledFacets::from_objects(obstacle_objects_at(s, h));
  const auto targets = CulledFacets::from_objects(target_objects(s, l, h));
  const auto view = prepare_view(samples, e, s.intrinsics, obstacles);
  return free_mask(g, mode, samples, view, s.intrinsics, targets);
}

VoxelMask build_model(const VoxelGrid& g, std::span<const VoxelMask> free_masks) {
  VoxelMask model(g.size(), 1);
  for (const auto& m : free_masks) {
    if (m.size() != g.size()) throw std::invalid_argument("free mask does not match the voxel grid");
    for (std::size_t v = 0; v < model.size(); ++v)
      if (m[v]) model[v] = 0;
  }
  return model;
}

VoxelMask rigid_interior_mask(const VoxelGrid& g, SamplingMode mode, std::span<const MeshObject> obstacles) {
  VoxelMask inside(g.size(), 0);
  for (const auto& o : obstacles) {
    if (o.facets.empty()) continue;
    const Box ob = bounding_box(o.facets);
    for (std::size_t v = 0; v < g.size(); ++v) {
      if (inside[v]) continue;
      if (mode == SamplingMode::center) {
        const Vec3 c = g.center(v);
        inside[v] = ob.contains(c) && point_in_mesh(c, o.facets);
      } else {
        const Box vb = g.voxel_box(v);
        if (!ob.contains(vb)) continue;
        bool all = point_in_mesh(g.center(v), o.facets);
        for (int c = 0; c < 8 && all; ++c)
          all = point_in_mesh({(c & 1) ? vb.hi.x : vb.lo.x, (c & 2) ? vb.hi.y : vb.lo.y, (c & 4) ? vb.hi.z : vb.lo.z},
                              o.facets);
        inside[v] = all;
      }
    }
  }
  return inside;
}

std::vector<Cluster> cluster_model(const VoxelGrid& g, const VoxelMask& model) {
  if (model.size() != g.size()) throw std::invalid_argument("model does not match the voxel grid");
  const auto d = g.dims();
  std::vector<Cluster> clusters;
  std::vector<std::uint8_t> seen(model.size(), 0);
  std::vector<std::size_t> stack;
  for (std::size_t seed = 0; seed < model.size(); ++seed) {
    if (!model[seed] || seen[seed]) continue;
    Cluster c;
    int kmin = d.nz, kmax = -1;
    seen[seed] = 1;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      c.voxels.push_back(v);
      const VoxelIndex x = g.unflat(v);
      kmin = std::min(kmin, x.k);
      kmax = std::max(kmax, x.k);
      const VoxelIndex nbrs[6] = {{x.i - 1, x.j, x.k}, {x.i + 1, x.j, x.k}, {x.i, x.j - 1, x.k},
                                  {x.i, x.j + 1, x.k}, {x.i, x.j, x.k - 1}, {x.i, x.j, x.k + 1}};
      for (const auto& n : nbrs) {
        if (!g.in_range(n)) continue;
        const std::size_t nf = g.flat(n);
        if (model[nf] && !seen[nf]) {
          seen[nf] = 1;
          stack.push_back(nf);
        }
      }
    }
    std::sort(c.voxels.begin(), c.voxels.end());
    c.volume = static_cast<double>(c.voxels.size()) * g.cell_volume();
    c.height = (kmax - kmin + 1) * g.cell().z;
    clusters.push_back(std::move(c));
  }
  return clusters;
}

VoxelMask apply_plausibility(const VoxelGrid& g, std::span<const Cluster> clusters, double min_volume,
                             double min_height) {
  VoxelMask out(g.size(), 0);
  for (const auto& c : clusters) {
    if (c.volume < min_volume || c.height < min_height) continue;
    for (std::size_t v : c.voxels) out[v] = 1;
  }
  return out;
}

std::size_t count(const VoxelMask& m) { return static_cast<std::size_t>(std::count_if(m.begin(), m.end(), [](auto b) { return b != 0; })); }

void dump_voxels(std::ostream& out, const VoxelGrid& g, std::span<const VoxelMask> free_masks, const VoxelMask& model) {
  out << "i,j,k,label\n";
  for (std::size_t v = 0; v < g.size(); ++v) {
    const VoxelIndex x = g.unflat(v);
    out << x.i << ',' << x.j << ',' << x.k << ',';
    if (v < model.size() && model[v]) {
      out << "model\n";
    } else {
      int n = 0;
      for (const auto& m : free_masks) n += m[v] ? 1 : 0;
      out << "free" << n << '\n';
    }
  }
}

}  // namespace camplace
