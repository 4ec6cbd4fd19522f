#include "camplace/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace camplace {

std::vector<Facet> tetra_facets(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return {Facet{{a, b, c}}, Facet{{a, b, d}}, Facet{{b, c, d}}, Facet{{a, c, d}}};
}

std::vector<Facet> box_facets(const Box& b) {
  const Vec3 &l = b.lo, &h = b.hi;
  const Vec3 p000{l.x, l.y, l.z}, p100{h.x, l.y, l.z}, p010{l.x, h.y, l.z}, p110{h.x, h.y, l.z};
  const Vec3 p001{l.x, l.y, h.z}, p101{h.x, l.y, h.z}, p011{l.x, h.y, h.z}, p111{h.x, h.y, h.z};
  return {Facet{{p000, p110, p100}}, Facet{{p000, p010, p110}},  // bottom
          Facet{{p001, p101, p111}}, Facet{{p001, p111, p011}},  // top
          Facet{{p000, p100, p101}}, Facet{{p000, p101, p001}},  // y = lo
          Facet{{p010, p111, p110}}, Facet{{p010, p011, p111}},  // y = hi
          Facet{{p000, p001, p011}}, Facet{{p000, p011, p010}},  // x = lo
          Facet{{p100, p110, p111}}, Facet{{p100, p111, p101}}}; // x = hi
}

namespace {

MeshObject tetra(const std::string& id, const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return {id, tetra_facets(a, b, c, d)};
}

std::vector<MeshObject> human(const std::string& id, double x, double y) {
  return {{id + "_torso", box_facets({{x, y, 0.0}, {x + 0.4, y + 0.3, 1.4}})},
          {id + "_head", box_facets({{x + 0.1, y + 0.05, 1.45}, {x + 0.3, y + 0.25, 1.7}})}};
}

std::vector<MeshObject> robot(const Vec3& arm_tip, const Vec3& tool_tip) {
  const MeshObject base =
      tetra("robot_base", {2.6, 0.7, 0.0}, {3.2, 0.7, 0.0}, {2.9, 1.3, 0.0}, {2.9, 0.9, 0.7});
  const MeshObject arm = tetra("robot_arm", {2.8, 0.8, 0.75}, {3.0, 0.8, 0.75}, {2.9, 1.0, 0.75}, arm_tip);
  const Vec3 t = tool_tip;
  const MeshObject tool = tetra("robot_tool", t + Vec3{0.0, 0.0, -0.25}, t + Vec3{0.15, 0.0, -0.25},
                                t + Vec3{0.0, 0.15, -0.25}, t);
  return {base, arm, tool};
}

}  // namespace

Scenario base_setup() {
  Scenario s;
  s.universe = {{0, 0, 0}, {4, 3, 3}};
  s.surveillance = s.universe;
  s.resolution = {16, 12, 12};
  s.time_steps = {0.0, 1.0};
  s.camera_count = 6;
  s.intrinsics.half_angle = 0.6;
  s.domain.kind = DomainKind::full_universe;
  s.seed = 42;

  s.obstacles.static_objects = {
      tetra("bench", {0.3, 0.3, 0.0}, {1.2, 0.3, 0.0}, {0.3, 1.1, 0.0}, {0.6, 0.6, 0.9}),
      tetra("shelf", {3.0, 2.3, 0.0}, {3.8, 2.3, 0.0}, {3.8, 2.9, 0.0}, {3.5, 2.6, 1.2})};
  s.obstacles.dynamic_objects = {robot({2.6, 1.2, 1.3}, {2.45, 1.3, 1.5}),
                                 robot({2.5, 1.5, 1.2}, {2.35, 1.6, 1.45})};

  const double w = 1.0 / 3.0;
  const std::pair<double, double> spots[3][2] = {
      {{1.4, 1.5}, {1.5, 1.6}}, {{1.8, 2.2}, {1.9, 2.1}}, {{0.8, 1.8}, {1.0, 1.7}}};
  for (int l = 0; l < 3; ++l) {
    AppearanceEvent ev;
    ev.weights = {w, w};
    for (int h = 0; h < 2; ++h)
      ev.targets.push_back(human("person" + std::to_string(l + 1), spots[l][h].first, spots[l][h].second));
    s.events.push_back(std::move(ev));
  }
  validate(s);
  return s;
}

Scenario line_search_setup() {
  Scenario s;
  s.universe = {{0, 0, 0}, {4, 3, 3}};
  s.surveillance = s.universe;
  s.resolution = {4, 3, 3};
  s.time_steps = {0.0};
  s.camera_count = 1;
  s.intrinsics.half_angle = 0.6;
  s.domain.kind = DomainKind::custom_box;
  s.domain.box = {{0.2, 0.1, 2.9}, {3.8, 0.1, 2.9}};
  s.domain.yaw_min = s.domain.yaw_max = std::numbers::pi / 2;
  s.domain.pitch_min = s.domain.pitch_max = -0.9;
  s.seed = 7;
  s.obstacles.dynamic_objects = {{tetra("robot", {0.8, 1.3, 0.0}, {1.3, 1.3, 0.0}, {1.0, 1.8, 0.0}, {1.0, 1.5, 0.8})}};
  AppearanceEvent ev;
  ev.weights = {1.0};
  ev.targets = {{{"person", box_facets({{2.2, 1.2, 0.0}, {2.8, 1.8, 1.6}})}}};
  s.events.push_back(std::move(ev));
  validate(s);
  return s;
}

std::optional<Scenario> preset(const std::string& name) {
  if (name == "base_setup") return base_setup();
  if (name == "line_search") return line_search_setup();
  return std::nullopt;
}

Scenario resolve_scenario(const std::string& name_or_path) {
  if (auto p = preset(name_or_path)) return *p;
  return load_scenario(name_or_path);
}

// ---------------------------------------------------------------------------

ObjectGenerator::ObjectGenerator(const Box& region, std::uint64_t seed, int max_attempts)
    : region_(region), rng_(seed), max_attempts_(max_attempts) {}

std::pair<int, int> ObjectGenerator::split_facets(int facet_count, int min_shapes) {
  if (facet_count < 4 || facet_count % 4 != 0)
    throw std::invalid_argument("facet count " + std::to_string(facet_count) + " is not a multiple of 4");
  int boxes = facet_count / 12;
  while (boxes >= 0 && (facet_count - 12 * boxes) % 4 != 0) --boxes;
  // trade boxes for tetrahedra (one box = three tetrahedra) until enough shapes
  while (boxes > 0 && boxes + (facet_count - 12 * boxes) / 4 < min_shapes) --boxes;
  return {boxes, (facet_count - 12 * boxes) / 4};
}

std::vector<Facet> ObjectGenerator::random_shape(bool box) {
  std::uniform_real_distribution<double> size(0.2, 0.5);
  const Vec3 ext = region_.extent();
  const Vec3 dims{std::min(size(rng_), ext.x), std::min(size(rng_), ext.y), std::min(size(rng_), ext.z)};
  std::uniform_real_distribution<double> ux(region_.lo.x, region_.hi.x - dims.x);
  std::uniform_real_distribution<double> uy(region_.lo.y, region_.hi.y - dims.y);
  std::uniform_real_distribution<double> uz(region_.lo.z, region_.hi.z - dims.z);
  const Vec3 lo{ux(rng_), uy(rng_), uz(rng_)};
  if (box) return box_facets({lo, lo + dims});
  std::uniform_real_distribution<double> frac(0.2, 0.8);
  return tetra_facets(lo, lo + Vec3{dims.x, 0, 0}, lo + Vec3{0, dims.y, 0},
                      lo + Vec3{frac(rng_) * dims.x, frac(rng_) * dims.y, dims.z});
}

std::vector<MeshObject> ObjectGenerator::make_objects(const std::string& prefix, int object_count, int boxes,
                                                      int tetrahedra, const std::vector<MeshObject>& avoid) {
  if (object_count < 1) throw std::invalid_argument("object count must be at least 1");
  std::vector<MeshObject> objects(object_count);
  for (int o = 0; o < object_count; ++o) objects[o].id = prefix + std::to_string(o + 1);
  std::vector<MeshObject> placed;
  const int shapes = boxes + tetrahedra;
  for (int sh = 0; sh < shapes; ++sh) {
    bool ok = false;
    for (int attempt = 0; attempt < max_attempts_ && !ok; ++attempt) {
      MeshObject cand{"", random_shape(sh < boxes)};
      ok = std::none_of(avoid.begin(), avoid.end(), [&](const MeshObject& a) { return objects_collide(cand, a); }) &&
           std::none_of(placed.begin(), placed.end(), [&](const MeshObject& a) { return objects_collide(cand, a); });
      if (ok) {
        auto& dst = objects[sh % object_count].facets;
        dst.insert(dst.end(), cand.facets.begin(), cand.facets.end());
        placed.push_back(std::move(cand));
      }
    }
    if (!ok)
      throw InfeasiblePlacement("could not place " + prefix + " shape " + std::to_string(sh + 1) + " after " +
                                std::to_string(max_attempts_) + " attempts");
  }
  std::erase_if(objects, [](const MeshObject& o) { return o.facets.empty(); });
  return objects;
}

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::voxel_resolution: return "voxel_resolution";
    case SweepAxis::static_facets: return "static_facets";
    case SweepAxis::dynamic_facets: return "dynamic_facets";
    case SweepAxis::dynamic_objects: return "dynamic_objects";
    case SweepAxis::target_facets: return "target_facets";
    case SweepAxis::target_objects: return "target_objects";
    case SweepAxis::time_steps: return "time_steps";
    case SweepAxis::events: return "events";
    case SweepAxis::camera_count: return "camera_count";
    case SweepAxis::placement_domain: return "placement_domain";
  }
  return "?";
}

SweepAxis sweep_axis_from_string(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(SweepAxis::placement_domain); ++i)
    if (to_string(static_cast<SweepAxis>(i)) == s) return static_cast<SweepAxis>(i);
  throw std::invalid_argument("unknown sweep axis '" + s + "'");
}

void SweepSpec::validate() const {
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  if (repetitions < 1) throw std::invalid_argument("sweep needs at least one repetition");
}

namespace {

std::vector<MeshObject> all_targets(const Scenario& s) {
  std::vector<MeshObject> out;
  for (const auto& ev : s.events)
    for (const auto& step : ev.targets) out.insert(out.end(), step.begin(), step.end());
  return out;
}

std::vector<MeshObject> targets_at(const Scenario& s, int h) {
  std::vector<MeshObject> out;
  for (const auto& ev : s.events) out.insert(out.end(), ev.targets[h].begin(), ev.targets[h].end());
  return out;
}

std::vector<MeshObject> concat(std::vector<MeshObject> a, const std::vector<MeshObject>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

int parse_int(const std::string& v, const char* what) {
  std::size_t pos = 0;
  int out = 0;
  try {
    out = std::stoi(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty()) throw std::invalid_argument(std::string(what) + ": '" + v + "' is not an integer");
  return out;
}

}  // namespace

Scenario apply_sweep_value(const Scenario& base, SweepAxis axis, const std::string& value, std::uint64_t scene_seed) {
  Scenario s = base;
  ObjectGenerator gen(s.surveillance, scene_seed);
  const int H = s.time_step_count();

  switch (axis) {
    case SweepAxis::voxel_resolution: {
      int nx = 0, ny = 0, nz = 0;
      char x1 = 0, x2 = 0;
      std::istringstream in(value);
      if (!(in >> nx >> x1 >> ny >> x2 >> nz) || x1 != 'x' || x2 != 'x')
        throw std::invalid_argument("voxel resolution '" + value + "' is not of the form NXxNYxNZ");
      s.resolution = {nx, ny, nz};
      break;
    }
    case SweepAxis::camera_count: s.camera_count = parse_int(value, "camera count"); break;
    case SweepAxis::placement_domain: s.domain.kind = domain_kind_from_string(value); break;
    case SweepAxis::static_facets: {
      const auto [boxes, tets] = ObjectGenerator::split_facets(parse_int(value, "static facets"), 2);
      std::vector<MeshObject> avoid = all_targets(s);
      for (const auto& step : s.obstacles.dynamic_objects) avoid = concat(avoid, step);
      s.obstacles.static_objects = gen.make_objects("static", 2, boxes, tets, avoid);
      break;
    }
    case SweepAxis::dynamic_facets:
    case SweepAxis::dynamic_objects: {
      for (int h = 0; h < H; ++h) {
        const auto avoid = concat(s.obstacles.static_objects, targets_at(s, h));
        if (axis == SweepAxis::dynamic_facets) {
          const auto [boxes, tets] = ObjectGenerator::split_facets(parse_int(value, "dynamic facets"), 3);
          s.obstacles.dynamic_objects[h] = gen.make_objects("dynamic" + std::to_string(h + 1) + "_", 3, boxes, tets, avoid);
        } else {
          const int k = parse_int(value, "dynamic objects");
          if (k < 1) throw std::invalid_argument("dynamic object count must be at least 1");
          s.obstacles.dynamic_objects[h] =
              gen.make_objects("dynamic" + std::to_string(h + 1) + "_", k, 2, std::max(0, k - 2), avoid);
        }
      }
      break;
    }
    case SweepAxis::target_facets:
    case SweepAxis::target_objects: {
      for (int l = 0; l < s.event_count(); ++l)
        for (int h = 0; h < H; ++h) {
          const auto avoid = obstacle_objects_at(s, h + 1);
          const std::string id = "target" + std::to_string(l + 1) + "_" + std::to_string(h + 1) + "_";
          if (axis == SweepAxis::target_facets) {
            const auto [boxes, tets] = ObjectGenerator::split_facets(parse_int(value, "target facets"), 2);
            s.events[l].targets[h] = gen.make_objects(id, 2, boxes, tets, avoid);
          } else {
            const int k = parse_int(value, "target objects");
            if (k < 1) throw std::invalid_argument("target object count must be at least 1");
            s.events[l].targets[h] = gen.make_objects(id, k, 2, std::max(0, k - 2), avoid);
          }
        }
      break;
    }
    case SweepAxis::time_steps: {
      const int steps = parse_int(value, "time steps");
      if (steps < 1) throw std::invalid_argument("time step count must be at least 1");
      s.time_steps.resize(steps);
      std::iota(s.time_steps.begin(), s.time_steps.end(), 0.0);
      for (auto& ev : s.events) {
        const auto first = ev.targets.front();
        const double w = ev.weights.front();
        ev.targets.assign(steps, first);
        ev.weights.assign(steps, w);
      }
      s.obstacles.dynamic_objects.assign(steps, {});
      for (int h = 0; h < steps; ++h)
        s.obstacles.dynamic_objects[h] = gen.make_objects("dynamic" + std::to_string(h + 1) + "_", 2, 0, 2,
                                                          concat(s.obstacles.static_objects, targets_at(s, h)));
      break;
    }
    case SweepAxis::events: {
      const int count = parse_int(value, "events");
      if (count < 1) throw std::invalid_argument("event count must be at least 1");
      constexpr int steps = 3;
      s.time_steps = {0.0, 1.0, 2.0};
      auto dyn = s.obstacles.dynamic_objects;
      s.obstacles.dynamic_objects.clear();
      for (int h = 0; h < steps; ++h) s.obstacles.dynamic_objects.push_back(dyn[std::min<int>(h, dyn.size() - 1)]);
      s.events.assign(count, {});
      for (int l = 0; l < count; ++l) {
        s.events[l].weights.assign(steps, 1.0 / count);
        for (int h = 0; h < steps; ++h) {
          const std::string id = "target" + std::to_string(l + 1) + "_" + std::to_string(h + 1) + "_";
          s.events[l].targets.push_back(gen.make_objects(id, 2, 0, 2, obstacle_objects_at(s, h + 1)));
        }
      }
      break;
    }
  }
  validate(s);
  return s;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double mean_iteration_ms(const SolverTrace& trace, EvalTiming* parts) {
  EvalTiming sum;
  std::size_t n = 0;
  for (const auto& r : trace.rows) {
    if (r.iteration < 2) continue;
    sum += r.timing;
    ++n;
  }
  if (n == 0 && !trace.rows.empty()) {
    sum = trace.rows.front().timing;
    n = 1;
  }
  if (n == 0) return 0;
  EvalTiming mean{sum.classify_ms / n, sum.cluster_ms / n, sum.distance_ms / n};
  if (parts) *parts = mean;
  return mean.total_ms();
}

RunRecord make_record(const std::string& value, std::uint64_t seed, const SolverResult& res, const Evaluator& ev) {
  RunRecord r;
  r.value = value;
  r.seed = seed;
  r.final_err = res.best_err;
  r.iterations = res.iterations;
  r.wall_time_s = res.wall_s;
  EvalTiming parts;
  mean_iteration_ms(res.trace, &parts);
  r.mean_classify_ms = parts.classify_ms;
  r.mean_cluster_ms = parts.cluster_ms;
  r.mean_distance_ms = parts.distance_ms;
  r.stop_reason = to_string(res.reason);
  r.mem_estimate_bytes = ev.storage_bytes() + res.trace.rows.size() * sizeof(TraceRow);
  r.peak_rss_bytes = peak_rss_bytes();
  return r;
}

std::vector<RunRecord> run_sweep(const Scenario& base, const SweepSpec& spec, const SweepOptions& opts,
                                 std::ostream* log) {
  spec.validate();
  std::vector<RunRecord> records;
  for (std::size_t vi = 0; vi < spec.values.size(); ++vi) {
    const std::string& value = spec.values[vi];
    const std::uint64_t scene_seed = splitmix64(opts.master_seed ^ splitmix64(vi + 1));
    std::optional<Scenario> scen;
    std::string why;
    try {
      scen = apply_sweep_value(base, spec.axis, value, scene_seed);
      if (opts.normalize_weights) normalize_weights(*scen);
    } catch (const InfeasiblePlacement& e) {
      why = e.what();
    } catch (const ValidationError& e) {
      why = e.what();
    }
    std::optional<Evaluator> ev;
    if (scen) ev.emplace(*scen, opts.mode);
    for (int rep = 0; rep < spec.repetitions; ++rep) {
      const std::uint64_t seed = splitmix64(opts.master_seed + 1000003ULL * (vi + 1) + static_cast<std::uint64_t>(rep));
      if (!scen) {
        RunRecord r;
        r.value = value;
        r.seed = seed;
        r.failed = true;
        r.stop_reason = "failed";
        records.push_back(r);
        if (log) *log << to_string(spec.axis) << '=' << value << " rep " << rep + 1 << ": failed (" << why << ")\n";
        continue;
      }
      SolverConfig cfg = opts.solver;
      cfg.seed = seed;
      StopCriteria stop = opts.stop;
      if (!stop.tolerance) stop.tolerance = squared_voxel_diagonal(*scen);
      if (!stop.time_limit_s && !stop.max_iterations) stop.time_limit_s = default_stop_criteria(*scen).time_limit_s;
      const SolverResult res = optimize(*ev, cfg, stop);
      records.push_back(make_record(value, seed, res, *ev));
      if (log)
        *log << to_string(spec.axis) << '=' << value << " rep " << rep + 1 << ": err " << res.best_err << " after "
             << res.iterations << " iterations (" << to_string(res.reason) << ")\n";
    }
  }
  return records;
}

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << "value,seed,final_err_m2,iterations,wall_time_s,mean_classify_ms,mean_cluster_ms,mean_distance_ms,"
         "stop_reason,mem_estimate_bytes,peak_rss_bytes\n";
  char buf[512];
  for (const auto& r : records) {
    if (r.failed) {
      std::snprintf(buf, sizeof buf, "%s,%llu,NA,NA,NA,NA,NA,NA,failed,NA,NA\n", r.value.c_str(),
                    static_cast<unsigned long long>(r.seed));
    } else {
      std::snprintf(buf, sizeof buf, "%s,%llu,%.17g,%ld,%.3f,%.4f,%.4f,%.4f,%s,%zu,%zu\n", r.value.c_str(),
                    static_cast<unsigned long long>(r.seed), r.final_err, r.iterations, r.wall_time_s,
                    r.mean_classify_ms, r.mean_cluster_ms, r.mean_distance_ms, r.stop_reason.c_str(),
                    r.mem_estimate_bytes, r.peak_rss_bytes);
    }
    out << buf;
  }
}

std::vector<RunRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("value,seed,final_err_m2", 0) != 0)
    throw std::runtime_error("malformed run-record CSV: missing header");
  std::vector<RunRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 11) throw std::runtime_error("malformed run-record CSV at line " + std::to_string(lineno));
    RunRecord r;
    try {
      r.value = f[0];
      r.seed = std::stoull(f[1]);
      r.stop_reason = f[8];
      r.failed = r.stop_reason == "failed";
      if (!r.failed) {
        r.final_err = std::stod(f[2]);
        r.iterations = std::stol(f[3]);
        r.wall_time_s = std::stod(f[4]);
        r.mean_classify_ms = std::stod(f[5]);
        r.mean_cluster_ms = std::stod(f[6]);
        r.mean_distance_ms = std::stod(f[7]);
        r.mem_estimate_bytes = std::stoull(f[9]);
        r.peak_rss_bytes = std::stoull(f[10]);
      }
    } catch (const std::exception&) {
      throw std::runtime_error("malformed run-record CSV at line " + std::to_string(lineno));
    }
    out.push_back(r);
  }
  return out;
}

std::vector<GroupSummary> summarize(const std::string& source, const std::vector<RunRecord>& records) {
  std::vector<GroupSummary> groups;
  for (const auto& r : records) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const GroupSummary& g) { return g.value == r.value; });
    if (it == groups.end()) {
      groups.push_back({});
      groups.back().source = source;
      groups.back().value = r.value;
      it = groups.end() - 1;
    }
    if (r.failed) {
      ++it->failed;
      continue;
    }
    ++it->runs;
    it->errs.push_back(r.final_err);
    it->success_rate += r.stop_reason == "tolerance" ? 1.0 : 0.0;
    it->mean_err += r.final_err;
    it->mean_iterations += static_cast<double>(r.iterations);
    it->mean_wall_s += r.wall_time_s;
    it->mean_iteration_ms += r.mean_classify_ms + r.mean_cluster_ms + r.mean_distance_ms;
  }
  for (auto& g : groups) {
    if (g.runs == 0) continue;
    g.success_rate /= g.runs;
    g.mean_err /= g.runs;
    g.mean_iterations /= g.runs;
    g.mean_wall_s /= g.runs;
    g.mean_iteration_ms /= g.runs;
    auto e = g.errs;
    std::sort(e.begin(), e.end());
    const std::size_t m = e.size() / 2;
    g.median_err = e.size() % 2 ? e[m] : 0.5 * (e[m - 1] + e[m]);
  }
  return groups;
}

void write_summary_table(std::ostream& out, const std::vector<GroupSummary>& groups) {
  out << "source,value,runs,failed,success_rate,mean_err_m2,median_err_m2,mean_iterations,mean_wall_s,"
         "mean_iteration_ms\n";
  char buf[512];
  for (const auto& g : groups) {
    std::snprintf(buf, sizeof buf, "%s,%s,%d,%d,%.4f,%.6g,%.6g,%.1f,%.3f,%.4f\n", g.source.c_str(), g.value.c_str(),
                  g.runs, g.failed, g.success_rate, g.mean_err, g.median_err, g.mean_iterations, g.mean_wall_s,
                  g.mean_iteration_ms);
    out << buf;
  }
}

void write_summary_svg(std::ostream& out, const std::vector<GroupSummary>& groups, double tolerance) {
  constexpr double W = 960, H = 420, pad = 50, panel = (W - 3 * pad) / 2, plot_h = H - 2 * pad - 40;
  const std::size_t n = std::max<std::size_t>(groups.size(), 1);
  double max_err = tolerance;
  for (const auto& g : groups)
    for (double e : g.errs) max_err = std::max(max_err, e);
  if (max_err <= 0) max_err = 1;
  const double slot = panel / n;
  char buf[512];

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << pad << "\" y=\"24\" font-size=\"14\">success rate (tolerance stop)</text>\n";
  out << "<text x=\"" << 2 * pad + panel << "\" y=\"24\" font-size=\"14\">final Err [m^2]</text>\n";
  for (int p = 0; p < 2; ++p) {
    const double x0 = pad + p * (panel + pad);
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n"
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                  x0, pad, x0, pad + plot_h, x0, pad + plot_h, x0 + panel, pad + plot_h);
    out << buf;
  }
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& g = groups[i];
    const double bx = pad + i * slot + 0.2 * slot;
    const double bh = g.success_rate * plot_h;
    std::snprintf(buf, sizeof buf, "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"#4878a8\"/>\n",
                  bx, pad + plot_h - bh, 0.6 * slot, bh);
    out << buf;
    const double cx = 2 * pad + panel + (i + 0.5) * slot;
    for (double e : g.errs) {
      std::snprintf(buf, sizeof buf, "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"3\" fill=\"#555\" fill-opacity=\"0.6\"/>\n",
                    cx, pad + plot_h - e / max_err * plot_h);
      out << buf;
    }
    if (g.runs > 0) {
      std::snprintf(buf, sizeof buf,
                    "<rect x=\"%.1f\" y=\"%.1f\" width=\"8\" height=\"8\" fill=\"#bbb\" stroke=\"#333\"/>\n",
                    cx - 4, pad + plot_h - g.mean_err / max_err * plot_h - 4);
      out << buf;
    }
    for (int p = 0; p < 2; ++p) {
      const double lx = pad + p * (panel + pad) + (i + 0.5) * slot;
      out << "<text x=\"" << lx << "\" y=\"" << pad + plot_h + 16 << "\" text-anchor=\"middle\">" << g.value
          << "</text>\n";
    }
  }
  const double ty = pad + plot_h - tolerance / max_err * plot_h;
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#c33\" stroke-dasharray=\"4 3\"/>\n",
                2 * pad + panel, ty, 2 * pad + 2 * panel, ty);
  out << buf;
  out << "</svg>\n";
}

std::size_t peak_rss_bytes() {
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("VmHWM:", 0) == 0) {
      std::istringstream ss(line.substr(6));
      std::size_t kb = 0;
      ss >> kb;
      return kb * 1024;
    }
  }
  return 0;
}

}  // namespace camplace
