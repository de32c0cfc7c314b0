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

#include "orcasim/agent.hpp"

#include <cmath>
#include <string>

#include "orcasim/errors.hpp"

namespace orcasim {

std::string_view to_string(AgentClass c) {
  return c == AgentClass::Vehicle ? "vehicle" : "pedestrian";
}

std::optional<AgentClass> parse_agent_class(std::string_view name) {
  if (name == "pedestrian") return AgentClass::Pedestrian;
  if (name == "vehicle") return AgentClass::Vehicle;
  return std::nullopt;
}

ResponsibilityMatrix ResponsibilityMatrix::shared_space_default() {
  ResponsibilityMatrix m;
  m.set(AgentClass::Pedestrian, AgentClass::Pedestrian, 0.5);
  m.set(AgentClass::Pedestrian, AgentClass::Vehicle, 1.0);
  m.set(AgentClass::Vehicle, AgentClass::Pedestrian, 0.0);
  m.set(AgentClass::Vehicle, AgentClass::Vehicle, 0.5);
  return m;
}

ResponsibilityMatrix ResponsibilityMatrix::reciprocal() { return ResponsibilityMatrix{}; }

void ResponsibilityMatrix::set(AgentClass self, AgentClass other, double value) {
  if (!std::isfinite(value) || value < 0.0 || value > 1.0) {
    throw ValidationError(std::string("responsibility.") + std::string(to_string(self)) + "." +
                              std::string(to_string(other)),
                          "fraction must lie in [0, 1]");
  }
  f_[class_index(self) * kAgentClassCount + class_index(other)] = value;
}

bool ResponsibilityMatrix::guarantees(AgentClass a, AgentClass b) const { return get(a, b) + get(b, a) >= 1.0; }

bool ResponsibilityMatrix::guarantees_all() const {
  for (std::size_t a = 0; a < kAgentClassCount; ++a) {
    for (std::size_t b = a; b < kAgentClassCount; ++b) {
      if (!guarantees(static_cast<AgentClass>(a), static_cast<AgentClass>(b))) return false;
    }
  }
  return true;
}

}  // namespace orcasim
