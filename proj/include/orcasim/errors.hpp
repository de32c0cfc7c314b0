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
#include <optional>
#include <stdexcept>
#include <string>

namespace orcasim {

/// Rejected input. `where()` names the offending item (constraint index,
/// agent id, config field path) so callers can surface it verbatim.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string where, const std::string& what)
      : std::invalid_argument(where.empty() ? what : where + ": " + what), where_(std::move(where)), detail_(what) {}

  const std::string& where() const noexcept { return where_; }
  /// Message without the location prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string where_;
  std::string detail_;
};

/// Error raised while advancing a simulation, annotated with frame and agent.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(std::uint64_t frame, std::optional<std::uint64_t> agent_id, const std::string& what)
      : std::runtime_error(format(frame, agent_id, what)), frame_(frame), agent_id_(agent_id) {}

  std::uint64_t frame() const noexcept { return frame_; }
  std::optional<std::uint64_t> agent_id() const noexcept { return agent_id_; }

 private:
  static std::string format(std::uint64_t frame, std::optional<std::uint64_t> agent_id, const std::string& what) {
    std::string s = "frame " + std::to_string(frame);
    if (agent_id) s += ", agent " + std::to_string(*agent_id);
    return s + ": " + what;
  }

  std::uint64_t frame_;
  std::optional<std::uint64_t> agent_id_;
};

/// Failure reading or writing a file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace orcasim
