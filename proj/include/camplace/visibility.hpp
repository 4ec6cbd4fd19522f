// Per-camera sensor map: every point of the universe is free, occupied or
// undetectable for a given camera setting, appearance event and time step.
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "camplace/geometry.hpp"
#include "camplace/scene.hpp"

namespace camplace {

/// Position plus yaw/pitch of a circular-cone camera (roll is irrelevant).
struct CameraSetting {
  Vec3 position;
  double yaw{0};
  double pitch{0};
  bool operator==(const CameraSetting&) const = default;
};

enum class SensorValue { free, occupied, undetectable };

std::string to_string(SensorValue v);

struct RayHit {
  bool hit{false};
  double t{0};
  std::size_t facet{0};
};

/// Slack on the occlusion comparison so that surface points are not
/// occluded by the surface they lie on (meters).
inline constexpr double kOcclusionEps = 1e-9;

Vec3 camera_axis(const CameraSetting& e);

bool cone_contains(const CameraSetting& e, const CameraIntrinsics& intr, const Vec3& p);
bool cone_contains(const CameraSetting& e, double half_angle, const Vec3& p);

/// Nearest intersection of origin + t*dir (t >= 0) with the facets.
RayHit first_hit(const Vec3& origin, const Vec3& dir, std::span<const Facet> facets);

/// Classifies p for camera e against event l at time step h (1-based).
/// Throws std::invalid_argument if p lies outside the universe.
SensorValue classify_point(const CameraSetting& e, const Scenario& s, int l, int h, const Vec3& p);

/// Variant taking pre-gathered facet sets; no universe check.
SensorValue classify_point(const CameraSetting& e, const CameraIntrinsics& intr,
                           std::span<const Facet> obstacles, std::span<const Facet> targets, const Vec3& p);

}  // namespace camplace
