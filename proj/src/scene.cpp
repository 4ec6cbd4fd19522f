#include "camplace/scene.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace camplace {

using nlohmann::json;

std::string to_string(DomainKind k) {
  switch (k) {
    case DomainKind::full_universe: return "full_universe";
    case DomainKind::ceiling: return "ceiling";
    case DomainKind::upper_fourth: return "upper_fourth";
    case DomainKind::custom_box: return "custom_box";
  }
  return "?";
}

DomainKind domain_kind_from_string(const std::string& s) {
  if (s == "full_universe") return DomainKind::full_universe;
  if (s == "ceiling") return DomainKind::ceiling;
  if (s == "upper_fourth") return DomainKind::upper_fourth;
  if (s == "custom_box") return DomainKind::custom_box;
  throw ParseError("unknown placement domain kind '" + s + "'");
}

namespace {

constexpr double kContainTol = 1e-9;
constexpr double kMinFacetArea = 1e-12;

Vec3 vec_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw ParseError(std::string(what) + ": expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec_to(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Box box_from(const json& j, const char* what) {
  if (!j.is_object() || !j.contains("min") || !j.contains("max"))
    throw ParseError(std::string(what) + ": expected {min, max}");
  return {vec_from(j["min"], what), vec_from(j["max"], what)};
}

json box_to(const Box& b) { return {{"min", vec_to(b.lo)}, {"max", vec_to(b.hi)}}; }

Facet facet_from(const json& j) {
  if (!j.is_array() || j.size() != 9) throw ParseError("facet: expected 9 numbers");
  Facet f;
  for (int i = 0; i < 3; ++i) f.v[i] = {j[3 * i].get<double>(), j[3 * i + 1].get<double>(), j[3 * i + 2].get<double>()};
  return f;
}

json facet_to(const Facet& f) {
  json a = json::array();
  for (const auto& v : f.v) {
    a.push_back(v.x);
    a.push_back(v.y);
    a.push_back(v.z);
  }
  return a;
}

std::vector<Facet> facets_from(const json& j) {
  if (!j.is_array()) throw ParseError("facet list: expected array");
  std::vector<Facet> out;
  for (const auto& f : j) out.push_back(facet_from(f));
  return out;
}

json facets_to(const std::vector<Facet>& fs) {
  json a = json::array();
  for (const auto& f : fs) a.push_back(facet_to(f));
  return a;
}

MeshObject object_from(const json& j) {
  if (!j.is_object()) throw ParseError("object: expected {id, facets}");
  return {j.value("id", std::string{}), facets_from(j.at("facets"))};
}

json object_to(const MeshObject& o) { return {{"id", o.id}, {"facets", facets_to(o.facets)}}; }

std::vector<MeshObject> objects_from(const json& j) {
  if (!j.is_array()) throw ParseError("object list: expected array");
  std::vector<MeshObject> out;
  for (const auto& o : j) out.push_back(object_from(o));
  return out;
}

json objects_to(const std::vector<MeshObject>& os) {
  json a = json::array();
  for (const auto& o : os) a.push_back(object_to(o));
  return a;
}

void check_object(const MeshObject& o, const Box& s, const std::string& where) {
  if (o.facets.empty()) throw ValidationError(where + ": object '" + o.id + "' has no facets");
  for (const auto& f : o.facets) {
    for (const auto& v : f.v) {
      if (!v.finite()) throw ValidationError(where + ": object '" + o.id + "' has a non-finite vertex");
      if (!s.contains(v, kContainTol))
        throw ValidationError(where + ": object '" + o.id + "' lies outside the surveillance area");
    }
    if (f.v[0] == f.v[1] || f.v[1] == f.v[2] || f.v[0] == f.v[2] || f.area() <= kMinFacetArea)
      throw ValidationError(where + ": object '" + o.id + "' has a degenerate facet");
  }
}

}  // namespace

bool objects_collide(const MeshObject& a, const MeshObject& b) {
  const Box ba = bounding_box(a.facets), bb = bounding_box(b.facets);
  if (box_box_distance(ba, bb) > 0) return false;
  for (const auto& fa : a.facets)
    for (const auto& fb : b.facets)
      if (triangles_intersect(fa, fb)) return true;
  // containment without touching facets
  if (point_in_mesh(a.facets.front().v[0], b.facets)) return true;
  if (point_in_mesh(b.facets.front().v[0], a.facets)) return true;
  return false;
}

void validate(const Scenario& s) {
  if (!s.universe.valid()) throw ValidationError("universe box is invalid");
  if (!s.surveillance.valid()) throw ValidationError("surveillance box is invalid");
  const Vec3 ext = s.surveillance.extent();
  if (ext.x <= 0 || ext.y <= 0 || ext.z <= 0) throw ValidationError("surveillance box has zero volume");
  if (!s.universe.contains(s.surveillance)) throw ValidationError("surveillance area is not inside the universe");
  if (s.resolution.nx < 1 || s.resolution.ny < 1 || s.resolution.nz < 1)
    throw ValidationError("voxel resolution must be at least 1 in every axis");
  const int H = s.time_step_count();
  if (H < 1) throw ValidationError("at least one time step is required");
  for (std::size_t h = 0; h < s.time_steps.size(); ++h) {
    if (!std::isfinite(s.time_steps[h])) throw ValidationError("time steps must be finite");
    if (h > 0 && s.time_steps[h] < s.time_steps[h - 1]) throw ValidationError("time steps must be non-decreasing");
  }
  if (s.event_count() < 1) throw ValidationError("at least one appearance event is required");
  if (s.camera_count < 0) throw ValidationError("camera count must be non-negative");
  if (!(s.intrinsics.half_angle > 0 && s.intrinsics.half_angle < std::numbers::pi / 2))
    throw ValidationError("cone half-angle must lie in (0, pi/2)");
  if (s.intrinsics.max_range && !(*s.intrinsics.max_range > 0))
    throw ValidationError("max range must be positive");

  const auto& d = s.domain;
  if (!(d.yaw_min >= -std::numbers::pi && d.yaw_max <= std::numbers::pi && d.yaw_min <= d.yaw_max))
    throw ValidationError("yaw bounds must satisfy -pi <= yaw_min <= yaw_max <= pi");
  if (!(d.pitch_min >= -std::numbers::pi / 2 && d.pitch_max <= std::numbers::pi / 2 && d.pitch_min <= d.pitch_max))
    throw ValidationError("pitch bounds must satisfy -pi/2 <= pitch_min <= pitch_max <= pi/2");
  if (d.kind == DomainKind::custom_box) {
    if (!d.box.valid()) throw ValidationError("custom placement box is empty");
    if (!s.universe.contains(d.box, kContainTol)) throw ValidationError("custom placement box leaves the universe");
  }

  const Box& S = s.surveillance;
  for (const auto& o : s.obstacles.static_objects) check_object(o, S, "static obstacles");
  if (static_cast<int>(s.obstacles.dynamic_objects.size()) != H)
    throw ValidationError("dynamic obstacles need exactly one entry per time step");
  for (int h = 0; h < H; ++h)
    for (const auto& o : s.obstacles.dynamic_objects[h]) check_object(o, S, "dynamic obstacles");

  if (s.critical_points) {
    if (static_cast<int>(s.critical_points->size()) != H)
      throw ValidationError("critical points need exactly one entry per time step");
    for (const auto& fs : *s.critical_points) {
      MeshObject tmp{"critical", fs};
      if (!fs.empty()) check_object(tmp, S, "critical points");
    }
  }

  for (int l = 0; l < s.event_count(); ++l) {
    const auto& ev = s.events[l];
    const std::string where = "event " + std::to_string(l + 1);
    if (static_cast<int>(ev.weights.size()) != H) throw ValidationError(where + ": need one weight per time step");
    if (static_cast<int>(ev.targets.size()) != H) throw ValidationError(where + ": need one target list per time step");
    for (double w : ev.weights)
      if (!std::isfinite(w) || w < 0) throw ValidationError(where + ": weights must be finite and non-negative");
    for (int h = 0; h < H; ++h) {
      for (const auto& o : ev.targets[h]) {
        check_object(o, S, where);
        for (const auto& b : obstacle_objects_at(s, h + 1))
          if (objects_collide(o, b))
            throw ValidationError(where + ": target '" + o.id + "' penetrates rigid obstacle '" + b.id +
                                  "' at time step " + std::to_string(h + 1));
      }
    }
  }

  if (!(s.plausibility.min_volume >= 0 && s.plausibility.min_height >= 0))
    throw ValidationError("plausibility thresholds must be non-negative");
}

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed scenario document: ") + e.what());
  }
  Scenario s;
  try {
    if (!j.is_object()) throw ParseError("scenario document must be an object");
    s.universe = box_from(j.at("universe"), "universe");
    s.surveillance = box_from(j.at("surveillance"), "surveillance");
    const auto& r = j.at("voxel_resolution");
    if (!r.is_array() || r.size() != 3) throw ParseError("voxel_resolution: expected [nx, ny, nz]");
    s.resolution = {r[0].get<int>(), r[1].get<int>(), r[2].get<int>()};
    s.time_steps = j.at("time_steps").get<std::vector<double>>();

    const auto& cam = j.at("cameras");
    s.camera_count = cam.at("count").get<int>();
    s.intrinsics.half_angle = cam.at("half_angle").get<double>();
    if (cam.contains("max_range") && !cam["max_range"].is_null())
      s.intrinsics.max_range = cam["max_range"].get<double>();
    if (cam.contains("domain")) {
      const auto& d = cam["domain"];
      s.domain.kind = domain_kind_from_string(d.value("kind", std::string("full_universe")));
      if (s.domain.kind == DomainKind::custom_box) s.domain.box = box_from(d.at("box"), "domain box");
      if (d.contains("yaw")) {
        const auto y = d["yaw"].get<std::vector<double>>();
        if (y.size() != 2) throw ParseError("domain yaw: expected [min, max]");
        s.domain.yaw_min = y[0];
        s.domain.yaw_max = y[1];
      }
      if (d.contains("pitch")) {
        const auto p = d["pitch"].get<std::vector<double>>();
        if (p.size() != 2) throw ParseError("domain pitch: expected [min, max]");
        s.domain.pitch_min = p[0];
        s.domain.pitch_max = p[1];
      }
    }

    if (j.contains("static_obstacles")) s.obstacles.static_objects = objects_from(j["static_obstacles"]);
    if (j.contains("dynamic_obstacles"))
      for (const auto& step : j["dynamic_obstacles"]) s.obstacles.dynamic_objects.push_back(objects_from(step));
    else
      s.obstacles.dynamic_objects.resize(s.time_steps.size());

    for (const auto& e : j.at("events")) {
      AppearanceEvent ev;
      ev.weights = e.at("weights").get<std::vector<double>>();
      for (const auto& step : e.at("targets")) ev.targets.push_back(objects_from(step));
      s.events.push_back(std::move(ev));
    }

    if (j.contains("critical_points") && !j["critical_points"].is_null()) {
      std::vector<std::vector<Facet>> cp;
      for (const auto& step : j["critical_points"]) cp.push_back(facets_from(step));
      s.critical_points = std::move(cp);
    }
    if (j.contains("plausibility")) {
      s.plausibility.min_volume = j["plausibility"].value("min_volume", 0.0);
      s.plausibility.min_height = j["plausibility"].value("min_height", 0.0);
    }
    s.rigid_exclusion = j.value("rigid_exclusion", true);
    s.seed = j.value("seed", std::uint64_t{0});
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed scenario document: ") + e.what());
  }
  validate(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string serialize_scenario(const Scenario& s) {
  json j;
  j["universe"] = box_to(s.universe);
  j["surveillance"] = box_to(s.surveillance);
  j["voxel_resolution"] = {s.resolution.nx, s.resolution.ny, s.resolution.nz};
  j["time_steps"] = s.time_steps;
  json dom = {{"kind", to_string(s.domain.kind)},
              {"yaw", {s.domain.yaw_min, s.domain.yaw_max}},
              {"pitch", {s.domain.pitch_min, s.domain.pitch_max}}};
  if (s.domain.kind == DomainKind::custom_box) dom["box"] = box_to(s.domain.box);
  j["cameras"] = {{"count", s.camera_count}, {"half_angle", s.intrinsics.half_angle}, {"domain", dom}};
  if (s.intrinsics.max_range) j["cameras"]["max_range"] = *s.intrinsics.max_range;
  j["static_obstacles"] = objects_to(s.obstacles.static_objects);
  j["dynamic_obstacles"] = json::array();
  for (const auto& step : s.obstacles.dynamic_objects) j["dynamic_obstacles"].push_back(objects_to(step));
  j["events"] = json::array();
  for (const auto& ev : s.events) {
    json e = {{"weights", ev.weights}, {"targets", json::array()}};
    for (const auto& step : ev.targets) e["targets"].push_back(objects_to(step));
    j["events"].push_back(e);
  }
  if (s.critical_points) {
    j["critical_points"] = json::array();
    for (const auto& step : *s.critical_points) j["critical_points"].push_back(facets_to(step));
  }
  j["plausibility"] = {{"min_volume", s.plausibility.min_volume}, {"min_height", s.plausibility.min_height}};
  j["rigid_exclusion"] = s.rigid_exclusion;
  j["seed"] = s.seed;
  return j.dump(1);
}

namespace {

void check_step(const Scenario& s, int h) {
  if (h < 1 || h > s.time_step_count())
    throw std::out_of_range("time step index " + std::to_string(h) + " out of range 1.." +
                            std::to_string(s.time_step_count()));
}

void check_event(const Scenario& s, int l) {
  if (l < 1 || l > s.event_count())
    throw std::out_of_range("event index " + std::to_string(l) + " out of range 1.." +
                            std::to_string(s.event_count()));
}

void append_facets(std::vector<Facet>& out, const std::vector<MeshObject>& objs) {
  for (const auto& o : objs) out.insert(out.end(), o.facets.begin(), o.facets.end());
}

}  // namespace

std::vector<MeshObject> obstacle_objects_at(const Scenario& s, int h) {
  check_step(s, h);
  std::vector<MeshObject> out = s.obstacles.static_objects;
  const auto& dyn = s.obstacles.dynamic_objects[h - 1];
  out.insert(out.end(), dyn.begin(), dyn.end());
  return out;
}

std::vector<Facet> obstacle_facets_at(const Scenario& s, int h) {
  check_step(s, h);
  std::vector<Facet> out;
  append_facets(out, s.obstacles.static_objects);
  append_facets(out, s.obstacles.dynamic_objects[h - 1]);
  return out;
}

const std::vector<MeshObject>& target_objects(const Scenario& s, int l, int h) {
  check_event(s, l);
  check_step(s, h);
  return s.events[l - 1].targets[h - 1];
}

std::vector<Facet> target_facets(const Scenario& s, int l, int h) {
  std::vector<Facet> out;
  append_facets(out, target_objects(s, l, h));
  return out;
}

std::vector<Facet> critical_facets(const Scenario& s, int h) {
  check_step(s, h);
  if (s.critical_points) return (*s.critical_points)[h - 1];
  std::vector<Facet> out;
  append_facets(out, s.obstacles.dynamic_objects[h - 1]);
  return out;
}

Box placement_box(const Scenario& s) {
  const Box& U = s.universe;
  switch (s.domain.kind) {
    case DomainKind::full_universe: return U;
    case DomainKind::ceiling: return {{U.lo.x, U.lo.y, U.hi.z}, U.hi};
    case DomainKind::upper_fourth: return {{U.lo.x, U.lo.y, U.hi.z - 0.25 * (U.hi.z - U.lo.z)}, U.hi};
    case DomainKind::custom_box: return s.domain.box;
  }
  return U;
}

void normalize_weights(Scenario& s) {
  double sum = 0;
  for (const auto& ev : s.events)
    for (double w : ev.weights) sum += w;
  if (sum <= 0) return;
  for (auto& ev : s.events)
    for (double& w : ev.weights) w /= sum;
}

double squared_voxel_diagonal(const Scenario& s) {
  const Vec3 e = s.surveillance.extent();
  const double cx = e.x / s.resolution.nx, cy = e.y / s.resolution.ny, cz = e.z / s.resolution.nz;
  return cx * cx + cy * cy + cz * cz;
}

}  // namespace camplace
