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

#include "orcasim/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "orcasim/errors.hpp"
#include "orcasim/neighbor_grid.hpp"
#include "orcasim/orca.hpp"
#include "orcasim/worker_pool.hpp"

namespace orcasim {
namespace {

constexpr std::size_t kAgentsPerTask = 256;

double goal_tolerance(const AgentState& a, const ScenarioConfig& config) {
  return config.goal_tolerance > 0.0 ? config.goal_tolerance : a.radius;
}

std::size_t task_count(std::size_t n) { return (n + kAgentsPerTask - 1) / kAgentsPerTask; }

template <typename Fn>
void for_each_chunk(WorkerPool& pool, std::size_t n, Fn&& fn) {
  pool.parallel_for(task_count(n), [&](std::size_t task) {
    const std::size_t begin = task * kAgentsPerTask;
    const std::size_t end = std::min(n, begin + kAgentsPerTask);
    for (std::size_t i = begin; i < end; ++i) fn(i);
  });
}

constexpr double kTargetCellOccupancy = 2.0;

// First-frame guess from the bounding-box density.
double initial_cell_size(std::span<const AgentState> agents, double neighbor_radius) {
  if (agents.size() < 2) return neighbor_radius;
  Vec2 lo = agents.front().position;
  Vec2 hi = lo;
  for (const auto& a : agents) {
    lo = {std::min(lo.x, a.position.x), std::min(lo.y, a.position.y)};
    hi = {std::max(hi.x, a.position.x), std::max(hi.y, a.position.y)};
  }
  const double area = (hi.x - lo.x) * (hi.y - lo.y);
  return std::sqrt(kTargetCellOccupancy * area / static_cast<double>(agents.size()));
}

// Rescales the cell so occupied cells hold about kTargetCellOccupancy agents.
double next_cell_size(const UniformGrid& grid) {
  if (grid.cell_count() == 0) return grid.cell_size();
  const double occupancy = static_cast<double>(grid.population()) / static_cast<double>(grid.cell_count());
  return grid.cell_size() * std::sqrt(kTargetCellOccupancy / occupancy);
}

FrameLog snapshot(std::uint64_t frame, double time, std::span<const AgentState> agents) {
  FrameLog log{frame, time, {}};
  log.agents.reserve(agents.size());
  for (const auto& a : agents) log.agents.push_back({a.id, a.agent_class, a.position, a.velocity, a.radius});
  return log;
}

// Reused between frames so per-agent constraint storage is not reallocated.
struct Workspace {
  std::vector<LpProblem> problems;
  double cell_size = 0.0;  // 0 until the first frame
};

StepResult step_impl(const SimState& state, const ScenarioConfig& config, WorkerPool& pool, Workspace& ws,
                     bool record_log) {
  const auto started = std::chrono::steady_clock::now();
  const std::span<const AgentState> agents(state.agents);
  const std::size_t n = agents.size();
  const std::uint64_t frame = state.frame + 1;

  StepResult out;
  out.state.frame = frame;
  out.state.time = static_cast<double>(frame) * config.dt;

  UniformGrid grid;
  try {
    if (ws.cell_size <= 0.0) ws.cell_size = initial_cell_size(agents, config.neighbor_radius);
    const double cell = std::clamp(ws.cell_size, config.neighbor_radius / 32.0, config.neighbor_radius);
    grid = UniformGrid::rebuild(agents, cell);
    ws.cell_size = next_cell_size(grid);
  } catch (const ValidationError& e) {
    throw SimulationError(frame, std::nullopt, e.what());
  }

  ws.problems.resize(n);
  pool.parallel_for(task_count(n), [&](std::size_t task) {
    std::vector<NeighborHit> hits;
    const std::size_t begin = task * kAgentsPerTask;
    const std::size_t end = std::min(n, begin + kAgentsPerTask);
    for (std::size_t i = begin; i < end; ++i) {
      const AgentState& self = agents[i];
      grid.query(agents, i, config.neighbor_radius, config.max_neighbors, hits);
      LpProblem& problem = ws.problems[i];
      problem.constraints.clear();
      for (const NeighborHit& hit : hits) {
        const AgentState& other = agents[hit.index];
        try {
          problem.constraints.push_back(build_orca_halfplane(
              self, other, config.responsibility.get(self.agent_class, other.agent_class), config.tau, config.dt));
        } catch (const ValidationError& e) {
          throw SimulationError(frame, self.id, "neighbor " + std::to_string(other.id) + ": " + e.what());
        }
      }
      problem.target = desired_velocity(self, config.dt);
      problem.speed_cap = self.max_speed;
      problem.shuffle_seed = problem_seed(self.id, frame);
    }
  });

  std::vector<LpResult> results;
  try {
    results = solve_batch(ws.problems, pool);
  } catch (const BatchValidationError& e) {
    throw SimulationError(frame, agents[e.problem_index()].id, e.what());
  }

  std::vector<AgentState>& next = out.state.agents;
  next.assign(agents.begin(), agents.end());
  for_each_chunk(pool, n, [&](std::size_t i) {
    next[i].velocity = results[i].velocity;
    next[i].position += results[i].velocity * config.dt;
  });

  FrameMetrics& m = out.metrics;
  m.frame = frame;
  for (std::size_t i = 0; i < n; ++i) {
    if (results[i].status == LpStatus::FallbackUsed) m.fallback_ids.push_back(agents[i].id);
  }
  m.fallback_count = m.fallback_ids.size();

  // Positions before goal removal feed the audit and the log.
  const std::vector<AgentState> moved = next;
  std::erase_if(next, [&](const AgentState& a) {
    if (norm(a.position - a.goal) > goal_tolerance(a, config)) return false;
    out.arrivals.emplace_back(a.id, out.state.time);
    return true;
  });
  m.arrivals = out.arrivals.size();
  m.active_agents = next.size();
  m.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();

  // Measurement only: outside the timed span.
  const SeparationAudit audit = audit_separation(moved, 0.0);
  m.min_separation = audit.min_separation;
  m.collision_count = audit.collision_count;
  if (record_log) out.log = snapshot(frame, out.state.time, moved);
  return out;
}

}  // namespace

Vec2 desired_velocity(const AgentState& agent, double dt) {
  const Vec2 to_goal = agent.goal - agent.position;
  const double distance = norm(to_goal);
  if (distance == 0.0) return {};
  const double speed = std::min(agent.pref_speed, distance / dt);
  return (to_goal / distance) * speed;
}

SeparationAudit audit_separation(std::span<const AgentState> agents, double search_radius) {
  SeparationAudit audit{std::numeric_limits<double>::infinity(), 0};
  if (agents.size() < 2) return audit;

  double max_radius = 0.0;
  Vec2 lo = agents.front().position;
  Vec2 hi = lo;
  for (const auto& a : agents) {
    max_radius = std::max(max_radius, a.radius);
    lo = {std::min(lo.x, a.position.x), std::min(lo.y, a.position.y)};
    hi = {std::max(hi.x, a.position.x), std::max(hi.y, a.position.y)};
  }
  const double extent = norm(hi - lo);
  double radius = search_radius > 0.0 ? search_radius : std::max(2.0 * max_radius, 1e-3);

  // Any pair separated by less than the best found so far lies within
  // radius + 2 * max_radius once some pair within `radius` has been seen.
  for (;;) {
    const double reach = radius + 2.0 * max_radius;
    const UniformGrid grid = UniformGrid::rebuild(agents, reach);
    bool found = false;
    double best = std::numeric_limits<double>::infinity();
    std::size_t collisions = 0;
    grid.for_each_pair_within(agents, reach, [&](std::size_t i, std::size_t j) {
      const double d = norm(agents[j].position - agents[i].position);
      const double separation = d - (agents[i].radius + agents[j].radius);
      if (d <= radius) found = true;
      best = std::min(best, separation);
      if (separation < -kCollisionTolerance) ++collisions;
    });
    if (found || reach >= extent) {
      audit.min_separation = best;
      audit.collision_count = collisions;
      return audit;
    }
    radius *= 4.0;
  }
}

StepResult step(const SimState& state, const ScenarioConfig& config, WorkerPool& pool) {
  Workspace ws;
  return step_impl(state, config, pool, ws, true);
}

double percentile(std::vector<double> samples, double q) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const double rank = std::ceil(q * static_cast<double>(samples.size()));
  const auto index = static_cast<std::size_t>(std::clamp(rank, 1.0, static_cast<double>(samples.size()))) - 1;
  return samples[index];
}

RunResult run(const ScenarioConfig& config, const RunOptions& options) {
  return run(config, make_initial_agents(config), options);
}

RunResult run(const ScenarioConfig& config, std::vector<AgentState> agents, const RunOptions& options) {
  if (options.workers == 0) throw ValidationError("workers", "must be at least 1");
  {
    std::unordered_set<AgentId> ids;
    for (const auto& a : agents) {
      if (!ids.insert(a.id).second) throw ValidationError("agent " + std::to_string(a.id), "duplicate id");
    }
  }

  RunResult result;
  RunSummary& summary = result.summary;
  summary.agents = agents.size();
  summary.seed = config.seed;
  summary.min_separation = std::numeric_limits<double>::infinity();
  summary.mean_travel_time.fill(std::numeric_limits<double>::quiet_NaN());

  std::unordered_map<AgentId, AgentClass> class_of;
  for (const auto& a : agents) class_of.emplace(a.id, a.agent_class);

  SimState state{0, 0.0, std::move(agents)};
  if (options.record_trajectories && !state.agents.empty()) {
    for (const auto& a : state.agents) result.trajectory.goals.push_back({a.id, a.goal});
    std::sort(result.trajectory.goals.begin(), result.trajectory.goals.end(),
              [](const GoalRecord& x, const GoalRecord& y) { return x.id < y.id; });
    result.trajectory.frames.push_back(snapshot(0, 0.0, state.agents));
  }

  const std::size_t limit = config.effective_max_frames();
  const std::size_t budget = options.frame_budget > 0 ? std::min(options.frame_budget, limit) : limit;
  WorkerPool pool(options.workers);
  Workspace ws;
  std::array<double, kAgentClassCount> travel_sum{};
  std::array<std::size_t, kAgentClassCount> travel_count{};
  std::vector<double> frame_ms;

  while (!state.agents.empty() && state.frame < budget) {
    StepResult stepped = step_impl(state, config, pool, ws, options.record_trajectories);
    const FrameMetrics& m = stepped.metrics;
    frame_ms.push_back(m.wall_time_ms);
    summary.total_collisions += m.collision_count;
    summary.min_separation = std::min(summary.min_separation, m.min_separation);
    summary.fallback_solves += m.fallback_count;
    for (const auto& [id, time] : stepped.arrivals) {
      const std::size_t c = class_index(class_of.at(id));
      travel_sum[c] += time;
      ++travel_count[c];
    }
    if (options.on_frame) options.on_frame(stepped);
    if (options.record_trajectories) result.trajectory.frames.push_back(std::move(stepped.log));
    result.metrics.push_back(std::move(stepped.metrics));
    state = std::move(stepped.state);
  }

  summary.frames = state.frame;
  summary.remaining_agents = state.agents.size();
  summary.terminated = state.agents.empty();
  summary.budget_exhausted = !summary.terminated && options.frame_budget > 0 && state.frame >= options.frame_budget;
  if (!frame_ms.empty()) {
    summary.mean_frame_ms = std::accumulate(frame_ms.begin(), frame_ms.end(), 0.0) / static_cast<double>(frame_ms.size());
    summary.p95_frame_ms = percentile(frame_ms, 0.95);
  }
  for (std::size_t c = 0; c < kAgentClassCount; ++c) {
    if (travel_count[c] > 0) summary.mean_travel_time[c] = travel_sum[c] / static_cast<double>(travel_count[c]);
  }
  return result;
}

}  // namespace orcasim
