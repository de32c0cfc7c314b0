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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "orcasim/errors.hpp"
#include "orcasim/vec2.hpp"

namespace orcasim {

class WorkerPool;

/// Half-plane of permitted velocities. A velocity v satisfies it iff
/// dot(v - boundary_point, outward_normal) >= 0.
struct HalfPlaneConstraint {
  Vec2 boundary_point;
  Vec2 outward_normal;

  /// Signed penetration of v: positive when v violates the constraint.
  double violation(Vec2 v) const { return dot(boundary_point - v, outward_normal); }
  bool satisfied_by(Vec2 v, double slack = 0.0) const { return violation(v) <= slack; }
};

/// Closest-point problem: minimise |v - target| over the intersection of
/// the half-planes and the disc |v| <= speed_cap.
struct LpProblem {
  std::vector<HalfPlaneConstraint> constraints;
  Vec2 target;
  double speed_cap = 0.0;
  std::uint64_t shuffle_seed = 0;
};

enum class LpStatus { Feasible, FallbackUsed };

struct LpResult {
  Vec2 velocity;
  LpStatus status = LpStatus::Feasible;
  /// Original (pre-shuffle) index of the constraint whose insertion emptied
  /// the feasible region. Set only for FallbackUsed.
  std::optional<std::size_t> failed_at;

  bool operator==(const LpResult&) const = default;
};

inline constexpr double kFeasibilitySlack = 1e-7;
inline constexpr double kNormalizationSlack = 1e-9;
inline constexpr std::size_t kDefaultWorkUnitSteps = 64;

/// Seidel-style randomized incremental solve in deterministic shuffled
/// order. Falls back to solve_least_penetration when the region is empty.
/// Throws ValidationError naming the offending constraint on non-finite or
/// non-unit input.
LpResult solve_closest_point(const LpProblem& problem);

/// Minimises the worst violation max(0, max_i violation_i(v)) over
/// |v| <= speed_cap; among minimisers returns the one closest to
/// warm_start. `warm_start` must satisfy constraints[0, start_index);
/// if it does not, the search restarts from index 0.
Vec2 solve_least_penetration(std::span<const HalfPlaneConstraint> constraints, double speed_cap,
                             std::size_t start_index, Vec2 warm_start);

/// Validation failure inside a batch, tagged with the problem index.
class BatchValidationError : public ValidationError {
 public:
  BatchValidationError(std::size_t problem_index, const ValidationError& cause)
      : ValidationError("problem[" + std::to_string(problem_index) + "]." + cause.where(), cause.detail()),
        problem_index_(problem_index) {}
  std::size_t problem_index() const noexcept { return problem_index_; }

 private:
  std::size_t problem_index_;
};

/// Deterministic seed for an agent's problem in a given frame.
std::uint64_t problem_seed(std::uint64_t agent_id, std::uint64_t frame);

/// Solves every problem; output is index-aligned and bitwise identical to
/// mapping solve_closest_point over the input, for any worker count.
/// Problems are grouped into work units of at least `work_unit_steps`
/// constraint insertions which workers claim from a shared queue. A
/// validation failure is rethrown for the lowest failing problem index.
std::vector<LpResult> solve_batch(std::span<const LpProblem> problems, WorkerPool& pool,
                                  std::size_t work_unit_steps = kDefaultWorkUnitSteps);

/// Convenience overload that spins up a temporary pool.
std::vector<LpResult> solve_batch(std::span<const LpProblem> problems, std::size_t worker_count,
                                  std::size_t work_unit_steps = kDefaultWorkUnitSteps);

/// Contiguous [begin, end) problem ranges used as work units.
std::vector<std::pair<std::size_t, std::size_t>> make_work_units(std::span<const LpProblem> problems,
                                                                 std::size_t work_unit_steps);

}  // namespace orcasim
