#include "camplace/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace camplace {

void SolverConfig::validate() const {
  if (archive_size < 2) throw std::invalid_argument("archive size must be at least 2");
  if (samples_per_iteration < 1) throw std::invalid_argument("samples per iteration must be at least 1");
  if (!(shrink > 0 && shrink < 1)) throw std::invalid_argument("shrink factor must lie in (0, 1)");
  if (!(restart_probability >= 0 && restart_probability <= 1))
    throw std::invalid_argument("restart probability must lie in [0, 1]");
  if (!(initial_width >= 0) || !(width_floor >= 0)) throw std::invalid_argument("kernel widths must be non-negative");
  if (stall_reset < 0) throw std::invalid_argument("stall reset must be non-negative");
  if (threads < 1) throw std::invalid_argument("thread count must be at least 1");
}

void StopCriteria::validate() const {
  if (!tolerance && !time_limit_s && !max_iterations) throw std::invalid_argument("no stop criterion set");
  if (tolerance && !(*tolerance >= 0)) throw std::invalid_argument("tolerance must be non-negative");
  if (time_limit_s && !(*time_limit_s >= 0)) throw std::invalid_argument("time limit must be non-negative");
  if (max_iterations && *max_iterations < 1) throw std::invalid_argument("iteration limit must be at least 1");
}

StopCriteria default_stop_criteria(const Scenario& s) {
  StopCriteria c;
  c.tolerance = squared_voxel_diagonal(s);
  c.time_limit_s = 600.0;
  return c;
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::none: return "none";
    case StopReason::tolerance: return "tolerance";
    case StopReason::time: return "time";
    case StopReason::iterations: return "iterations";
    case StopReason::exhausted: return "exhausted";
  }
  return "?";
}

StopReason check_stop(double best_err, long iteration, double elapsed_s, const StopCriteria& stop) {
  if (stop.tolerance && best_err <= *stop.tolerance) return StopReason::tolerance;
  if (stop.time_limit_s && elapsed_s > *stop.time_limit_s) return StopReason::time;
  if (stop.max_iterations && iteration >= *stop.max_iterations) return StopReason::iterations;
  return StopReason::none;
}

void write_trace_csv(std::ostream& out, const SolverTrace& trace, bool include_timing) {
  out << "iteration,best_err_m2,eval_ms_classify,eval_ms_cluster,eval_ms_distance,kernel_width\n";
  char buf[256];
  for (const auto& r : trace.rows) {
    if (include_timing)
      std::snprintf(buf, sizeof buf, "%ld,%.17g,%.3f,%.3f,%.3f,%.17g\n", r.iteration, r.best_err, r.timing.classify_ms,
                    r.timing.cluster_ms, r.timing.distance_ms, r.kernel_width);
    else
      std::snprintf(buf, sizeof buf, "%ld,%.17g,NA,NA,NA,%.17g\n", r.iteration, r.best_err, r.kernel_width);
    out << buf;
  }
}

SearchSpace::SearchSpace(const Scenario& s) : n_(s.camera_count) {
  const Box pb = placement_box(s);
  const auto& d = s.domain;
  const bool full_yaw = d.yaw_min <= -std::numbers::pi && d.yaw_max >= std::numbers::pi;
  for (int i = 0; i < n_; ++i) {
    const double lo[5] = {pb.lo.x, pb.lo.y, pb.lo.z, d.yaw_min, d.pitch_min};
    const double hi[5] = {pb.hi.x, pb.hi.y, pb.hi.z, d.yaw_max, d.pitch_max};
    for (int c = 0; c < 5; ++c) {
      lo_.push_back(lo[c]);
      hi_.push_back(hi[c]);
      periodic_.push_back(c == 3 && full_yaw);
    }
  }
}

std::vector<double> SearchSpace::encode(const SettingsTuple& t) const {
  std::vector<double> x;
  x.reserve(t.size() * 5);
  for (const auto& e : t) x.insert(x.end(), {e.position.x, e.position.y, e.position.z, e.yaw, e.pitch});
  return x;
}

SettingsTuple SearchSpace::decode(const std::vector<double>& x) const {
  SettingsTuple t(x.size() / 5);
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i] = {{x[5 * i], x[5 * i + 1], x[5 * i + 2]}, x[5 * i + 3], x[5 * i + 4]};
  return t;
}

double SearchSpace::fold(std::size_t d, double v) const {
  const double lo = lo_[d], hi = hi_[d];
  if (periodic_[d]) {
    const double w = hi - lo;
    double r = std::fmod(v - lo, w);
    if (r < 0) r += w;
    return lo + r;
  }
  return std::clamp(v, lo, hi);
}

bool SearchSpace::contains(const SettingsTuple& t) const {
  if (static_cast<int>(t.size()) != n_) return false;
  const auto x = encode(t);
  for (std::size_t d = 0; d < x.size(); ++d)
    if (!(x[d] >= lo_[d] && x[d] <= hi_[d])) return false;
  return true;
}

SettingsTuple SearchSpace::uniform(std::mt19937_64& rng) const {
  std::vector<double> x(lo_.size());
  for (std::size_t d = 0; d < x.size(); ++d) {
    std::uniform_real_distribution<double> u(lo_[d], hi_[d]);
    x[d] = lo_[d] == hi_[d] ? lo_[d] : std::min(u(rng), hi_[d]);
  }
  return decode(x);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void merge_into_archive(std::vector<Candidate>& archive, Candidate c, std::size_t capacity, bool& entered) {
  // ties keep the earlier entry in front
  auto pos = std::upper_bound(archive.begin(), archive.end(), c.err,
                              [](double e, const Candidate& a) { return e < a.err; });
  if (static_cast<std::size_t>(pos - archive.begin()) >= capacity) return;
  archive.insert(pos, std::move(c));
  if (archive.size() > capacity) archive.pop_back();
  entered = true;
}

}  // namespace

std::vector<Candidate> initial_population(const Evaluator& ev, const SearchSpace& space, const SolverConfig& cfg,
                                          std::mt19937_64& rng, EvalTiming* timing) {
  const std::size_t k = space.cameras() == 0 ? 1 : static_cast<std::size_t>(cfg.archive_size);
  std::vector<Candidate> pop;
  for (std::size_t i = 0; i < k; ++i) {
    Candidate c{space.uniform(rng), 0.0};
    const ErrValue v = ev.evaluate(c.settings);
    if (timing) *timing += v.timing;
    c.err = v.total;
    pop.push_back(std::move(c));
  }
  std::stable_sort(pop.begin(), pop.end(), [](const Candidate& a, const Candidate& b) { return a.err < b.err; });
  return pop;
}

std::size_t pick_rank(std::size_t archive_size, std::mt19937_64& rng) {
  std::vector<double> w(archive_size);
  for (std::size_t j = 0; j < archive_size; ++j) w[j] = static_cast<double>(archive_size - j);
  std::discrete_distribution<std::size_t> dist(w.begin(), w.end());
  return dist(rng);
}

SettingsTuple sample_candidate(const std::vector<Candidate>& archive, const SearchSpace& space,
                               const SolverConfig& cfg, double kernel_width, std::mt19937_64& rng) {
  if (archive.empty()) throw std::invalid_argument("cannot sample from an empty archive");
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < cfg.restart_probability) return space.uniform(rng);
  const auto& base = archive[pick_rank(archive.size(), rng)];
  std::vector<double> x = space.encode(base.settings);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double range = space.hi(d) - space.lo(d);
    const double z = gauss(rng);
    if (range > 0 && kernel_width > 0) x[d] += z * kernel_width * range;
    x[d] = space.fold(d, x[d]);
  }
  return space.decode(x);
}

SolverResult optimize(const Evaluator& ev, const SolverConfig& cfg, const StopCriteria& stop,
                      const ProgressFn& progress) {
  cfg.validate();
  stop.validate();
  const auto t_start = Clock::now();
  const SearchSpace space(ev.scenario());
  std::mt19937_64 rng(cfg.seed);
  SolverResult res;

  TraceRow row;
  row.iteration = 1;
  auto archive = initial_population(ev, space, cfg, rng, &row.timing);
  double width = cfg.initial_width;
  row.best_err = archive.front().err;
  row.kernel_width = width;
  row.evaluations = static_cast<int>(archive.size());
  res.trace.rows.push_back(row);
  res.evaluations = row.evaluations;
  if (progress) progress(row);

  long iteration = 1;
  StopReason reason = check_stop(archive.front().err, iteration, seconds_since(t_start), stop);
  if (reason == StopReason::none && space.cameras() == 0) reason = StopReason::exhausted;

  const std::size_t capacity = static_cast<std::size_t>(cfg.archive_size);
  const std::size_t batch = static_cast<std::size_t>(cfg.samples_per_iteration);
  int stalled = 0;
  while (reason == StopReason::none) {
    ++iteration;
    std::vector<SettingsTuple> cands(batch);
    for (auto& c : cands) c = sample_candidate(archive, space, cfg, width, rng);

    std::optional<double> threshold;
    if (cfg.early_abort && archive.size() == capacity) threshold = archive.back().err;

    std::vector<ErrValue> vals(batch);
    if (cfg.threads > 1 && batch > 1) {
      std::vector<std::thread> pool;
      const std::size_t nt = std::min<std::size_t>(cfg.threads, batch);
      for (std::size_t t = 0; t < nt; ++t)
        pool.emplace_back([&, t] {
          for (std::size_t i = t; i < batch; i += nt) vals[i] = ev.evaluate(cands[i], threshold);
        });
      for (auto& th : pool) th.join();
    } else {
      for (std::size_t i = 0; i < batch; ++i) vals[i] = ev.evaluate(cands[i], threshold);
    }

    TraceRow r;
    r.iteration = iteration;
    bool entered = false;
    for (std::size_t i = 0; i < batch; ++i) {
      r.timing += vals[i].timing;
      res.cap_uses += vals[i].cap_uses;
      if (vals[i].aborted) {
        ++r.aborted;
        continue;
      }
      merge_into_archive(archive, {std::move(cands[i]), vals[i].total}, capacity, entered);
    }
    stalled = entered ? 0 : stalled + 1;
    if (!entered) width = std::max(width * cfg.shrink, cfg.width_floor);
    if (cfg.stall_reset > 0 && stalled >= cfg.stall_reset) {
      width = cfg.initial_width;
      stalled = 0;
    }
    r.best_err = archive.front().err;
    r.kernel_width = width;
    r.evaluations = static_cast<int>(batch);
    res.evaluations += r.evaluations;
    res.trace.rows.push_back(r);
    if (progress) progress(r);
    reason = check_stop(archive.front().err, iteration, seconds_since(t_start), stop);
  }

  res.best = archive.front().settings;
  res.best_err = archive.front().err;
  res.reason = reason;
  res.iterations = iteration;
  res.wall_s = seconds_since(t_start);
  return res;
}

}  // namespace camplace
