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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "orcasim/agent.hpp"
#include "orcasim/lp_solver.hpp"
#include "orcasim/scenario.hpp"
#include "orcasim/trajectory_io.hpp"

namespace orcasim {

class WorkerPool;

/// Unit vector toward the goal scaled to pref_speed; shortened so the agent
/// lands exactly on the goal when it is within one step; zero at the goal.
Vec2 desired_velocity(const AgentState& agent, double dt);

struct SimState {
  std::uint64_t frame = 0;
  double time = 0.0;
  std::vector<AgentState> agents;
};

/// Collision tolerance on pairwise separation.
inline constexpr double kCollisionTolerance = 1e-6;

struct FrameMetrics {
  std::uint64_t frame = 0;
  /// Simulation update only; the separation audit and logging are excluded.
  double wall_time_ms = 0.0;
  /// Minimum over pairs of centre distance minus summed radii; +inf with
  /// fewer than two agents.
  double min_separation = 0.0;
  /// Pairs with separation < -kCollisionTolerance.
  std::size_t collision_count = 0;
  /// Agents still active after goal removal.
  std::size_t active_agents = 0;
  std::size_t arrivals = 0;
  std::size_t fallback_count = 0;
  /// Ids of agents whose LP needed the least-penetration fallback.
  std::vector<AgentId> fallback_ids;
};

/// Exact minimum separation and collision count over all pairs.
struct SeparationAudit {
  double min_separation = 0.0;
  std::size_t collision_count = 0;
};
SeparationAudit audit_separation(std::span<const AgentState> agents, double search_radius);

struct StepResult {
  SimState state;
  FrameMetrics metrics;
  /// Agents as integrated this frame, before goal removal.
  FrameLog log;
  std::vector<std::pair<AgentId, double>> arrivals;  // (id, arrival time)
};

/// Advances one synchronous frame: index, constrain, solve, integrate,
/// audit, then remove arrivals. New velocities depend only on `state`.
StepResult step(const SimState& state, const ScenarioConfig& config, WorkerPool& pool);

struct RunOptions {
  std::size_t workers = 1;
  bool record_trajectories = true;
  /// Stop after this many frames even if agents remain (0 = config limit).
  /// A run stopped by a frame budget is not a non-termination.
  std::size_t frame_budget = 0;
  /// Called after each frame (outside the timed region).
  std::function<void(const StepResult&)> on_frame;
};

struct RunSummary {
  std::size_t agents = 0;
  std::uint64_t seed = 0;
  std::size_t frames = 0;
  bool terminated = false;  // every agent reached its goal
  bool budget_exhausted = false;
  std::size_t total_collisions = 0;
  double min_separation = 0.0;
  double mean_frame_ms = 0.0;
  double p95_frame_ms = 0.0;
  std::size_t fallback_solves = 0;
  /// Mean arrival time per class (NaN when no agent of the class arrived).
  std::array<double, kAgentClassCount> mean_travel_time{};
  std::size_t remaining_agents = 0;
};

struct RunResult {
  TrajectoryLog trajectory;
  std::vector<FrameMetrics> metrics;
  RunSummary summary;
};

/// Runs until every agent has arrived, the frame budget is spent, or
/// config.effective_max_frames() is reached (summary.terminated = false).
RunResult run(const ScenarioConfig& config, const RunOptions& options = {});
RunResult run(const ScenarioConfig& config, std::vector<AgentState> agents, const RunOptions& options = {});

/// Percentile by nearest rank over a copy of the samples.
double percentile(std::vector<double> samples, double q);

}  // namespace orcasim
