// World description: surveillance cuboid, obstacle and target collectives per
// time step, weighted appearance events and the camera placement domain.
#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "camplace/geometry.hpp"

namespace camplace {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MeshObject {
  std::string id;
  std::vector<Facet> facets;
  bool operator==(const MeshObject&) const = default;
};

struct ObstacleCollectives {
  std::vector<MeshObject> static_objects;
  /// One list per time step.
  std::vector<std::vector<MeshObject>> dynamic_objects;
  bool operator==(const ObstacleCollectives&) const = default;
};

struct AppearanceEvent {
  /// weights[h] is the probability weight of this event at time step h.
  std::vector<double> weights;
  /// targets[h] is the unmodelled collective for this event at time step h.
  std::vector<std::vector<MeshObject>> targets;
  bool operator==(const AppearanceEvent&) const = default;
};

enum class DomainKind { full_universe, ceiling, upper_fourth, custom_box };

std::string to_string(DomainKind k);
DomainKind domain_kind_from_string(const std::string& s);

struct PlacementDomain {
  DomainKind kind{DomainKind::full_universe};
  /// Only read for custom_box; may be degenerate (a plane, segment or point).
  Box box{};
  double yaw_min{-std::numbers::pi}, yaw_max{std::numbers::pi};
  double pitch_min{-std::numbers::pi / 2}, pitch_max{std::numbers::pi / 2};
  bool operator==(const PlacementDomain&) const = default;
};

struct CameraIntrinsics {
  double half_angle{0.6};
  std::optional<double> max_range;
  bool operator==(const CameraIntrinsics&) const = default;
};

struct PlausibilityThresholds {
  double min_volume{0.0};
  double min_height{0.0};
  bool operator==(const PlausibilityThresholds&) const = default;
};

struct VoxelResolution {
  int nx{1}, ny{1}, nz{1};
  bool operator==(const VoxelResolution&) const = default;
};

struct Scenario {
  Box universe;
  Box surveillance;
  VoxelResolution resolution;
  std::vector<double> time_steps;
  std::vector<AppearanceEvent> events;
  ObstacleCollectives obstacles;
  int camera_count{0};
  CameraIntrinsics intrinsics;
  PlacementDomain domain;
  /// Explicit critical point facets per time step; empty means the dynamic
  /// obstacle collective is used.
  std::optional<std::vector<std::vector<Facet>>> critical_points;
  PlausibilityThresholds plausibility;
  /// Voxels lying inside rigid obstacles are removed from the model.
  bool rigid_exclusion{true};
  std::uint64_t seed{0};

  int time_step_count() const { return static_cast<int>(time_steps.size()); }
  int event_count() const { return static_cast<int>(events.size()); }
  bool operator==(const Scenario&) const = default;
};

/// Parses and validates a JSON scenario document.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
std::string serialize_scenario(const Scenario& s);

/// Throws ValidationError naming the first violated invariant.
void validate(const Scenario& s);

/// Static facets followed by the dynamic facets of step h (1-based).
std::vector<Facet> obstacle_facets_at(const Scenario& s, int h);
/// Static objects followed by the dynamic objects of step h (1-based).
std::vector<MeshObject> obstacle_objects_at(const Scenario& s, int h);
/// Target facets of event l at step h (both 1-based).
std::vector<Facet> target_facets(const Scenario& s, int l, int h);
const std::vector<MeshObject>& target_objects(const Scenario& s, int l, int h);
/// Critical points C(t_h): the override if present, else the dynamic obstacles.
std::vector<Facet> critical_facets(const Scenario& s, int h);

/// Facet intersection or containment between two closed meshes.
bool objects_collide(const MeshObject& a, const MeshObject& b);

/// Box of admissible camera positions for the scenario's domain.
Box placement_box(const Scenario& s);

/// Scales all weights so they sum to one.
void normalize_weights(Scenario& s);

/// Squared voxel diagonal; the default optimization tolerance.
double squared_voxel_diagonal(const Scenario& s);

}  // namespace camplace
