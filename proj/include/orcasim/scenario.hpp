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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "orcasim/agent.hpp"
#include "orcasim/errors.hpp"
#include "orcasim/vec2.hpp"

namespace orcasim {

inline constexpr int kScenarioFormatVersion = 1;

/// Axis-aligned rectangle [min, max].
struct Rect {
  Vec2 min;
  Vec2 max;

  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
  bool contains(Vec2 p) const { return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y; }
  bool operator==(const Rect&) const = default;
};

struct ClassParams {
  double radius = 0.25;
  double pref_speed = 1.4;
  double max_speed = 2.0;
  bool operator==(const ClassParams&) const = default;
};

/// Agents of one class spawned in `spawn`, each heading to a uniformly drawn
/// point of `goal`.
struct SpawnRegion {
  Rect spawn;
  Rect goal;
  AgentClass agent_class = AgentClass::Pedestrian;
  std::size_t count = 0;
  bool operator==(const SpawnRegion&) const = default;
};

struct ScenarioConfig {
  int format_version = kScenarioFormatVersion;
  std::vector<SpawnRegion> regions;
  std::array<ClassParams, kAgentClassCount> classes{ClassParams{0.25, 1.4, 2.0}, ClassParams{1.0, 3.0, 5.0}};
  ResponsibilityMatrix responsibility = ResponsibilityMatrix::shared_space_default();
  double dt = 0.1;
  double tau = 2.0;
  double neighbor_radius = 15.0;
  std::size_t max_neighbors = 16;
  /// Non-positive means "agent radius".
  double goal_tolerance = 0.0;
  double clearance_time = 0.5;
  std::uint64_t seed = 0;
  /// Zero means derive from the scenario extent.
  std::size_t max_frames = 0;
  /// Non-fatal findings from validation (e.g. a responsibility pair outside
  /// the collision-free guarantee).
  std::vector<std::string> warnings;

  const ClassParams& params(AgentClass c) const { return classes[class_index(c)]; }
  ClassParams& params(AgentClass c) { return classes[class_index(c)]; }
  std::size_t total_agents() const;
  /// max_frames, or 100 x (diagonal of all regions / slowest pref_speed) / dt.
  std::size_t effective_max_frames() const;
};

/// Checks invariants and appends warnings. Throws ValidationError naming the
/// field path (e.g. "regions[2].spawn").
void validate(ScenarioConfig& config);

/// Parses a JSON scenario document; missing optional fields take defaults.
/// `source` is used as the location prefix in diagnostics.
ScenarioConfig parse_scenario(const std::string& text, const std::string& source = "<string>");
ScenarioConfig load_scenario(const std::filesystem::path& path);
std::string scenario_to_json(const ScenarioConfig& config);

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits; stdlib-independent.
double uniform01(Rng& rng);
Vec2 uniform_point(const Rect& rect, Rng& rng);

/// Disc already placed, which new spawns must keep clear of.
struct PlacedDisc {
  Vec2 position;
  double radius = 0.0;
  double pref_speed = 0.0;
};

class SpawnError : public ValidationError {
 public:
  SpawnError(std::size_t achieved, std::size_t requested)
      : ValidationError("spawn", "region too dense: placed " + std::to_string(achieved) + " of " +
                                     std::to_string(requested)),
        achieved_(achieved) {}
  std::size_t achieved() const noexcept { return achieved_; }

 private:
  std::size_t achieved_;
};

/// Rejection-samples `count` points in `region` with pairwise distance
/// >= 2 * radius + pref_speed * clearance_time. Against `occupied` discs
/// the requirement is radius + other.radius + max(pref speeds) * clearance_time.
std::vector<Vec2> sample_spawns(const Rect& region, std::size_t count, double radius, double pref_speed,
                                double clearance_time, Rng& rng, std::span<const PlacedDisc> occupied = {});

/// Spawns every region in order from one generator seeded with config.seed:
/// spawn points first, then goals, per region. Ids are 0..N-1 in spawn
/// order; initial velocity is the initial desired velocity.
std::vector<AgentState> make_initial_agents(const ScenarioConfig& config);

enum class CrossingKind { TwoWay, FourWay };

/// Opposing crowds (two arms) or four arms crossing through the centre.
/// Spawn rectangles are sized for a fixed density; each arm's goal region
/// is the opposite arm's spawn region.
ScenarioConfig make_crossing(CrossingKind kind, std::size_t agents_per_arm, double vehicle_fraction,
                             std::uint64_t seed);

}  // namespace orcasim
