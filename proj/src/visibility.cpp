#include "camplace/visibility.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace camplace {

std::string to_string(SensorValue v) {
  switch (v) {
    case SensorValue::free: return "free";
    case SensorValue::occupied: return "occupied";
    case SensorValue::undetectable: return "undetectable";
  }
  return "?";
}

Vec3 camera_axis(const CameraSetting& e) {
  const double cp = std::cos(e.pitch);
  return {cp * std::cos(e.yaw), cp * std::sin(e.yaw), std::sin(e.pitch)};
}

bool cone_contains(const CameraSetting& e, double half_angle, const Vec3& p) {
  const Vec3 d = p - e.position;
  const double len = d.norm();
  if (len == 0.0) return true;
  // angle <= alpha  <=>  cos(angle) >= cos(alpha)
  return dot(d, camera_axis(e)) >= len * std::cos(half_angle);
}

bool cone_contains(const CameraSetting& e, const CameraIntrinsics& intr, const Vec3& p) {
  if (intr.max_range && distance(p, e.position) > *intr.max_range) return false;
  return cone_contains(e, intr.half_angle, p);
}

RayHit first_hit(const Vec3& origin, const Vec3& dir, std::span<const Facet> facets) {
  RayHit best;
  best.t = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < facets.size(); ++i) {
    const auto t = ray_triangle(origin, dir, facets[i]);
    if (t && *t < best.t) {
      best = {true, *t, i};
    }
  }
  if (!best.hit) best.t = 0;
  return best;
}

SensorValue classify_point(const CameraSetting& e, const CameraIntrinsics& intr, std::span<const Facet> obstacles,
                           std::span<const Facet> targets, const Vec3& p) {
  if (!cone_contains(e, intr, p)) return SensorValue::undetectable;
  const Vec3 dir = p - e.position;
  const double dp = dir.norm();
  if (dp == 0.0) return SensorValue::free;

  // t is measured in units of |p - position|, so p itself sits at t = 1
  const RayHit obs = first_hit(e.position, dir, obstacles);
  const double t_obs = obs.hit ? obs.t : std::numeric_limits<double>::infinity();
  if (t_obs < 1.0 - kOcclusionEps / dp) return SensorValue::undetectable;

  const RayHit tar = first_hit(e.position, dir, targets);
  if (tar.hit && tar.t < t_obs && (!intr.max_range || tar.t * dp <= *intr.max_range))
    return SensorValue::occupied;
  return SensorValue::free;
}

SensorValue classify_point(const CameraSetting& e, const Scenario& s, int l, int h, const Vec3& p) {
  if (!s.universe.contains(p)) throw std::invalid_argument("classify_point: point outside the universe");
  const auto obstacles = obstacle_facets_at(s, h);
  const auto targets = target_facets(s, l, h);
  return classify_point(e, s.intrinsics, obstacles, targets, p);
}

}  // namespace camplace
