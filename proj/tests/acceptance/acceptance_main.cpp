/*
 * Copyright (c) 2026 The orcasim Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 * SPDX-License-Identifier: Apache-2.0
 */

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "orcasim/engine.hpp"
#include "orcasim/lp_solver.hpp"
#include "orcasim/neighbor_grid.hpp"
#include "orcasim/scenario.hpp"
#include "orcasim/trajectory_io.hpp"

namespace {

using namespace orcasim;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

Outcome lp_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1);
  std::size_t worst_index = 0;
  double worst = 0.0;
  std::size_t failures = 0;
  constexpr std::size_t kProblems = 10000;
  for (std::size_t i = 0; i < kProblems; ++i) {
    const LpProblem p = oracle::random_feasible_problem(rng, 16, 1e-3);
    const LpResult r = solve_closest_point(p);
    const auto expected = oracle::grid_closest_point(p.constraints, p.speed_cap, p.target);
    const double err = expected ? norm(r.velocity - *expected) : oracle::kInf;
    if (err > worst) {
      worst = err;
      worst_index = i;
    }
    if (!(err <= 1e-4) || r.status != LpStatus::Feasible) ++failures;
  }
  const double elapsed = seconds_since(start);
  return {failures == 0 && elapsed < 60.0,
          fmt("%zu problems, %zu outside 1e-4, max error %.3g (problem %zu), %.1f s", kProblems, failures, worst,
              worst_index, elapsed)};
}

Outcome collision_freedom() {
  const auto start = Clock::now();
  std::size_t bad_frames = 0;
  std::size_t fallback_solves = 0;
  std::size_t seeds_with_collisions = 0;
  double min_sep = oracle::kInf;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    ScenarioConfig c = make_crossing(CrossingKind::TwoWay, 100, 0.0, seed);
    c.responsibility = ResponsibilityMatrix::reciprocal();
    c.dt = 0.1;
    c.tau = 2.0;
    RunOptions o;
    o.record_trajectories = false;
    const RunResult r = run(c, o);
    std::size_t frames = 0;
    for (const auto& m : r.metrics) {
      if (m.min_separation < -kCollisionTolerance) ++frames;
    }
    bad_frames += frames;
    if (frames > 0) ++seeds_with_collisions;
    fallback_solves += r.summary.fallback_solves;
    min_sep = std::min(min_sep, r.summary.min_separation);
  }
  const double elapsed = seconds_since(start);
  return {bad_frames == 0 && elapsed < 120.0,
          fmt("20 seeds x 200 pedestrians: %zu frames below -1e-6 (%zu seeds affected), min separation %.3g m, "
              "%zu fallback solves, %.1f s",
              bad_frames, seeds_with_collisions, min_sep, fallback_solves, elapsed)};
}

AgentState make_agent(AgentId id, AgentClass cls, const ClassParams& p, Vec2 position, Vec2 goal, double dt) {
  AgentState a;
  a.id = id;
  a.agent_class = cls;
  a.radius = p.radius;
  a.pref_speed = p.pref_speed;
  a.max_speed = p.max_speed;
  a.position = position;
  a.goal = goal;
  a.velocity = desired_velocity(a, dt);
  return a;
}

Outcome asymmetric_responsibility() {
  ScenarioConfig c;
  c.max_frames = 1000;
  const ClassParams& car = c.params(AgentClass::Vehicle);
  const ClassParams& person = c.params(AgentClass::Pedestrian);
  std::vector<AgentState> agents{
      make_agent(0, AgentClass::Vehicle, car, {-20, 0}, {20, 0}, c.dt),
      make_agent(1, AgentClass::Pedestrian, person, {12, 0.05}, {-12, 0.05}, c.dt),
  };
  double car_dev = 0.0;
  double ped_dev = 0.0;
  bool all_feasible = true;
  RunOptions o;
  o.on_frame = [&](const StepResult& s) {
    if (s.metrics.fallback_count > 0) all_feasible = false;
    for (const auto& rec : s.log.agents) {
      if (rec.id == 0 && all_feasible) car_dev = std::max(car_dev, std::fabs(rec.position.y));
      if (rec.id == 1) ped_dev = std::max(ped_dev, std::fabs(rec.position.y - 0.05));
    }
  };
  const RunResult r = run(c, agents, o);
  const bool pass = car_dev <= 1e-9 && ped_dev > 1e-3 && r.summary.total_collisions == 0 && r.summary.terminated;
  return {pass, fmt("vehicle max lateral deviation %.3g m, pedestrian %.3g m, collisions %zu, all LPs feasible: %s",
                    car_dev, ped_dev, r.summary.total_collisions, all_feasible ? "yes" : "no")};
}

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome batch_determinism() {
  const fs::path dir = fs::temp_directory_path() / "orcasim_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  struct Case {
    const char* name;
    ScenarioConfig config;
    std::size_t budget;
  };
  std::vector<Case> cases{
      {"two_way", make_crossing(CrossingKind::TwoWay, 80, 0.0, 3), 0},
      {"four_way_mixed", make_crossing(CrossingKind::FourWay, 60, 0.3, 4), 0},
      {"four_way_dense", make_crossing(CrossingKind::FourWay, 250, 0.5, 5), 250},
  };
  std::size_t mismatches = 0;
  std::size_t rows = 0;
  for (const auto& c : cases) {
    std::string reference;
    for (std::size_t workers : {1U, 2U, 4U}) {
      RunOptions o;
      o.workers = workers;
      o.frame_budget = c.budget;
      const RunResult r = run(c.config, o);
      const fs::path path = dir / (std::string(c.name) + "_w" + std::to_string(workers) + ".csv");
      write_trajectories(r.trajectory, path);
      const std::string bytes = file_bytes(path);
      if (workers == 1) {
        reference = bytes;
        for (const auto& f : r.trajectory.frames) rows += f.agents.size();
      } else if (bytes != reference) {
        ++mismatches;
      }
    }
  }
  fs::remove_all(dir);
  return {mismatches == 0, fmt("3 scenarios x workers {1,2,4}: %zu mismatching files, %zu rows per worker set",
                               mismatches, rows)};
}

Outcome class_neutrality() {
  const std::vector<double> fractions{0.0, 0.5, 1.0};
  constexpr std::size_t kFrames = 100;
  constexpr int kReps = 5;
  std::vector<ScenarioConfig> configs;
  std::vector<std::vector<AgentState>> initial;
  for (double f : fractions) {
    configs.push_back(make_crossing(CrossingKind::FourWay, 1000, f, 21));
    initial.push_back(make_initial_agents(configs.back()));
  }
  std::vector<std::vector<double>> means(fractions.size());
  RunOptions o;
  o.record_trajectories = false;
  o.frame_budget = kFrames;
  o.workers = std::max(1U, std::thread::hardware_concurrency());
  for (int rep = 0; rep < kReps; ++rep) {
    for (std::size_t k = 0; k < fractions.size(); ++k) {
      means[k].push_back(run(configs[k], initial[k], o).summary.mean_frame_ms);
    }
  }
  std::vector<double> medians;
  for (auto& m : means) {
    std::sort(m.begin(), m.end());
    medians.push_back(m[m.size() / 2]);
  }
  const auto [lo, hi] = std::minmax_element(medians.begin(), medians.end());
  const double spread = (*hi - *lo) / *lo;
  return {spread < 0.10, fmt("4000 agents, mean frame ms at vehicle fraction 0 / 0.5 / 1: %.2f / %.2f / %.2f, spread %.1f%%",
                             medians[0], medians[1], medians[2], 100.0 * spread)};
}

double bench_mean_ms(std::size_t agents, std::size_t workers, std::size_t frames) {
  const ScenarioConfig c = make_crossing(CrossingKind::FourWay, agents / 4, 0.0, 31);
  const auto initial = make_initial_agents(c);
  RunOptions o;
  o.record_trajectories = false;
  o.frame_budget = frames;
  o.workers = workers;
  std::vector<double> reps;
  for (int rep = 0; rep < 3; ++rep) reps.push_back(run(c, initial, o).summary.mean_frame_ms);
  std::sort(reps.begin(), reps.end());
  return reps[1];
}

Outcome scaling() {
  const std::size_t hw = std::max(1U, std::thread::hardware_concurrency());
  const std::vector<std::size_t> counts{1000, 2000, 4000, 8000, 16000};
  std::vector<double> xs;
  std::vector<double> ys;
  std::string table;
  for (std::size_t n : counts) {
    const double ms = bench_mean_ms(n, hw, 20);
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(ms));
    table += fmt(" %zu:%.2fms", n, ms);
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double exponent = sxy / sxx;
  bool pass = exponent < 2.0;
  std::string speedup_note;
  if (hw >= 4) {
    const double one = bench_mean_ms(16000, 1, 20);
    const double four = bench_mean_ms(16000, 4, 20);
    const double speedup = one / four;
    pass = pass && speedup >= 2.0;
    speedup_note = fmt("16k speedup 4 vs 1 workers %.2fx", speedup);
  } else {
    speedup_note = fmt("speedup check not applicable: %zu hardware thread(s), needs >= 4", hw);
  }
  return {pass, fmt("exponent %.3f at %zu workers (%s);%s", exponent, hw, speedup_note.c_str(), table.c_str())};
}

Outcome scenario_scale() {
  const auto start = Clock::now();
  std::string detail;
  bool pass = true;
  for (CrossingKind kind : {CrossingKind::TwoWay, CrossingKind::FourWay}) {
    const std::size_t arms = kind == CrossingKind::TwoWay ? 2 : 4;
    const ScenarioConfig c = make_crossing(kind, 2500 / arms, 0.1, 7);
    RunOptions o;
    o.record_trajectories = false;
    o.workers = std::max(1U, std::thread::hardware_concurrency());
    const RunResult r = run(c, o);
    pass = pass && r.summary.terminated && r.summary.total_collisions == 0;
    detail += fmt("%s: %zu agents, %s in %zu frames, %zu collisions, min separation %.3g m, %zu fallback solves; ",
                  kind == CrossingKind::TwoWay ? "2-way" : "4-way", r.summary.agents,
                  r.summary.terminated ? "all arrived" : "NOT all arrived", r.summary.frames,
                  r.summary.total_collisions, r.summary.min_separation, r.summary.fallback_solves);
  }
  const double elapsed = seconds_since(start);
  pass = pass && elapsed < 600.0;
  return {pass, detail + fmt("%.1f s", elapsed)};
}

Outcome spawn_audit() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t failures = 0;
  std::size_t points = 0;
  for (int combo = 0; combo < 100; ++combo) {
    const double w = 5.0 + 45.0 * unit(rng);
    const double h = 5.0 + 45.0 * unit(rng);
    const Rect region{{-100 + 50 * unit(rng), -100 + 50 * unit(rng)}, {}};
    const Rect rect{region.min, {region.min.x + w, region.min.y + h}};
    const double radius = 0.2 + 0.9 * unit(rng);
    const double pref = 1.0 + 2.5 * unit(rng);
    const double clearance = 0.5 * unit(rng);
    const double spacing = 2.0 * radius + pref * clearance;
    const auto max_count = static_cast<std::size_t>(w * h / (4.0 * spacing * spacing));
    const std::size_t count = 1 + static_cast<std::size_t>(unit(rng) * static_cast<double>(max_count));
    Rng spawn_rng(rng());
    std::vector<Vec2> pts;
    try {
      pts = sample_spawns(rect, count, radius, pref, clearance, spawn_rng);
    } catch (const SpawnError&) {
      ++failures;
      continue;
    }
    points += pts.size();
    bool ok = pts.size() == count;
    for (std::size_t i = 0; i < pts.size() && ok; ++i) {
      if (!rect.contains(pts[i])) ok = false;
      for (std::size_t j = i + 1; j < pts.size() && ok; ++j) {
        if (norm(pts[j] - pts[i]) < spacing) ok = false;
      }
    }
    if (!ok) ++failures;
  }
  return {failures == 0, fmt("100 region/count combinations, %zu points audited pairwise, %zu failures", points, failures)};
}

Outcome grid_oracle() {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t mismatches = 0;
  std::size_t queries = 0;
  for (int config = 0; config < 500; ++config) {
    const std::size_t n = 1 + rng() % 400;
    const double extent = 1.0 + 50.0 * unit(rng);
    std::vector<AgentState> agents(n);
    for (std::size_t i = 0; i < n; ++i) {
      agents[i].id = rng() % 1000000;
      agents[i].position = {extent * (2 * unit(rng) - 1), extent * (2 * unit(rng) - 1)};
      // Snap some positions to a lattice to create distance ties.
      if (i % 5 == 0) agents[i].position = {std::round(agents[i].position.x), std::round(agents[i].position.y)};
    }
    std::sort(agents.begin(), agents.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    agents.erase(std::unique(agents.begin(), agents.end(), [](const auto& a, const auto& b) { return a.id == b.id; }),
                 agents.end());
    std::shuffle(agents.begin(), agents.end(), rng);
    const double radius = 0.5 + 10.0 * unit(rng);
    const double cell = radius * (0.5 + 4.5 * unit(rng));
    const std::size_t max_count = rng() % 24;
    const UniformGrid grid = UniformGrid::rebuild(agents, cell, {unit(rng), unit(rng)});
    for (std::size_t s = 0; s < agents.size(); ++s) {
      std::vector<std::pair<double, AgentId>> brute;
      for (std::size_t j = 0; j < agents.size(); ++j) {
        if (j == s) continue;
        const double dx = agents[j].position.x - agents[s].position.x;
        const double dy = agents[j].position.y - agents[s].position.y;
        const double d2 = dx * dx + dy * dy;
        if (d2 <= radius * radius) brute.emplace_back(d2, agents[j].id);
      }
      std::sort(brute.begin(), brute.end());
      if (brute.size() > max_count) brute.resize(max_count);
      const auto got = query_neighbors(grid, agents, agents[s].id, radius, max_count);
      bool same = got.size() == brute.size();
      for (std::size_t k = 0; k < got.size() && same; ++k) same = got[k].id == brute[k].second;
      if (!same) ++mismatches;
      ++queries;
    }
  }
  return {mismatches == 0, fmt("500 configurations, %zu queries, %zu mismatches", queries, mismatches)};
}

Outcome trajectory_round_trip() {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> d(-1e4, 1e4);
  const fs::path dir = fs::temp_directory_path() / "orcasim_acceptance_roundtrip";
  fs::create_directories(dir);
  std::size_t failures = 0;
  std::size_t rows = 0;
  for (int k = 0; k < 50; ++k) {
    TrajectoryLog log;
    const std::size_t agents = 1 + rng() % 40;
    for (std::size_t i = 0; i < agents; ++i) log.goals.push_back({i, {d(rng), d(rng)}});
    const std::size_t frames = 1 + rng() % 20;
    for (std::size_t f = 0; f < frames; ++f) {
      FrameLog frame{f, static_cast<double>(f) * 0.1, {}};
      for (std::size_t i = 0; i < agents; ++i) {
        frame.agents.push_back({i, rng() % 2 ? AgentClass::Vehicle : AgentClass::Pedestrian,
                                {d(rng), d(rng) * 1e-9},
                                {d(rng) / 3.0, std::ldexp(d(rng), -200)},
                                0.25 + 1e-3 * d(rng) * d(rng)});
        ++rows;
      }
      log.frames.push_back(std::move(frame));
    }
    const fs::path path = dir / ("log" + std::to_string(k) + ".csv");
    write_trajectories(log, path);
    if (!(read_trajectories(path) == log)) ++failures;
  }
  fs::remove_all(dir);
  return {failures == 0, fmt("50 logs, %zu rows, %zu mismatches", rows, failures)};
}

}  // namespace

int main(int argc, char** argv) {
  // Optional arguments select criteria by number; default runs all.
  std::vector<std::size_t> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::strtoul(argv[i], nullptr, 10));
  struct Criterion {
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {"lp_oracle_equivalence", lp_oracle},
      {"collision_freedom_two_way", collision_freedom},
      {"asymmetric_responsibility", asymmetric_responsibility},
      {"batch_determinism", batch_determinism},
      {"class_proportion_neutrality", class_neutrality},
      {"scaling_shape", scaling},
      {"scenario_scale_2500", scenario_scale},
      {"spawn_separation_audit", spawn_audit},
      {"neighbor_grid_oracle", grid_oracle},
      {"trajectory_round_trip", trajectory_round_trip},
  };
  int failed = 0;
  std::size_t run_count = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), i + 1) == selected.end()) continue;
    ++run_count;
    Outcome o;
    try {
      o = criteria[i].check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, run_count);
  return failed == 0 ? 0 : 1;
}
