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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "orcasim/agent.hpp"
#include "orcasim/vec2.hpp"

namespace orcasim {

struct AgentRecord {
  AgentId id = 0;
  AgentClass agent_class = AgentClass::Pedestrian;
  Vec2 position;
  Vec2 velocity;
  double radius = 0.0;
  bool operator==(const AgentRecord&) const = default;
};

/// Snapshot of every agent at the end of one frame.
struct FrameLog {
  std::uint64_t frame = 0;
  double time = 0.0;
  std::vector<AgentRecord> agents;
  bool operator==(const FrameLog&) const = default;
};

struct GoalRecord {
  AgentId id = 0;
  Vec2 goal;
  bool operator==(const GoalRecord&) const = default;
};

struct TrajectoryLog {
  std::vector<GoalRecord> goals;
  std::vector<FrameLog> frames;
  bool operator==(const TrajectoryLog&) const = default;
};

/// Trajectory text format:
///
///   # orcasim trajectory v1
///   # goal,<agent_id>,<x>,<y>            (one line per agent)
///   frame,time,agent_id,class,x,y,vx,vy,radius
///   <one row per (frame, agent)>
///
/// Floats use the shortest representation that round-trips exactly. Frames
/// without agents have no rows and are not represented.
std::string format_trajectories(const TrajectoryLog& log);
TrajectoryLog parse_trajectories(const std::string& text);

/// Atomic: written to a temporary sibling, then renamed. Throws IoError.
void write_trajectories(const TrajectoryLog& log, const std::filesystem::path& path);
TrajectoryLog read_trajectories(const std::filesystem::path& path);

/// Writes `contents` to a temporary sibling of `path` and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Shortest exact decimal form of a double.
std::string format_double(double v);

}  // namespace orcasim
