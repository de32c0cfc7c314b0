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
#include <cstdint>
#include <optional>
#include <string_view>

#include "orcasim/vec2.hpp"

namespace orcasim {

using AgentId = std::uint64_t;

enum class AgentClass : std::uint8_t { Pedestrian = 0, Vehicle = 1 };

inline constexpr std::size_t kAgentClassCount = 2;

constexpr std::size_t class_index(AgentClass c) { return static_cast<std::size_t>(c); }

std::string_view to_string(AgentClass c);
std::optional<AgentClass> parse_agent_class(std::string_view name);

/// One simulated entity. Pedestrians and vehicles share this type and the
/// same steering path; only parameters and responsibility fractions differ.
struct AgentState {
  AgentId id = 0;
  Vec2 position;
  Vec2 velocity;
  double radius = 0.0;
  double pref_speed = 0.0;
  double max_speed = 0.0;
  Vec2 goal;
  AgentClass agent_class = AgentClass::Pedestrian;

  bool operator==(const AgentState&) const = default;
};

/// Avoidance share f(A|B) that an agent of class A takes when avoiding B.
class ResponsibilityMatrix {
 public:
  /// Pedestrian pairs and vehicle pairs split evenly; pedestrians take full
  /// responsibility toward vehicles, which concede nothing.
  static ResponsibilityMatrix shared_space_default();
  /// f = 1/2 for every ordered pair.
  static ResponsibilityMatrix reciprocal();

  /// Throws ValidationError unless value is finite and within [0, 1].
  void set(AgentClass self, AgentClass other, double value);
  double get(AgentClass self, AgentClass other) const {
    return f_[class_index(self) * kAgentClassCount + class_index(other)];
  }

  /// f(A|B) + f(B|A) >= 1 for this unordered pair.
  bool guarantees(AgentClass a, AgentClass b) const;
  /// Guarantee holds for every unordered pair.
  bool guarantees_all() const;

  bool operator==(const ResponsibilityMatrix&) const = default;

 private:
  std::array<double, kAgentClassCount * kAgentClassCount> f_{0.5, 0.5, 0.5, 0.5};
};

}  // namespace orcasim
