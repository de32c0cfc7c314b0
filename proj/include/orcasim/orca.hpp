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

#include <span>
#include <vector>

#include "orcasim/agent.hpp"
#include "orcasim/lp_solver.hpp"
#include "orcasim/vec2.hpp"

namespace orcasim {

/// Which part of the velocity-obstacle boundary the exit lands on.
enum class VoRegion { CutoffDisc, LeftLeg, RightLeg, OverlapDisc };

/// Shortest displacement `u` from the relative velocity to the boundary of
/// the velocity obstacle, and the outward unit normal at that boundary point.
/// dot(u, normal) > 0 when the relative velocity is inside the obstacle.
struct VoExit {
  Vec2 u;
  Vec2 normal;
  VoRegion region = VoRegion::CutoffDisc;
};

/// Velocity obstacle of a neighbour at `rel_position` (other - self) for
/// relative velocity `rel_velocity` (self - other): the cone from the origin
/// tangent to the disc of radius combined_radius / tau at rel_position / tau,
/// truncated by that disc. When the agents already overlap the dt-horizon
/// disc is used instead so the exit separates them within one step.
///
/// Throws ValidationError on non-finite input, non-positive radius/tau/dt,
/// or coincident centres.
VoExit compute_vo_exit(Vec2 rel_position, Vec2 rel_velocity, double combined_radius, double tau, double dt);

/// Half-plane through v_opt + f * u, with v_opt the agent's current velocity.
HalfPlaneConstraint build_orca_halfplane(const AgentState& self, const AgentState& other, double f, double tau,
                                         double dt);

/// One constraint per neighbour, order-aligned; f taken from the matrix
/// for (self.class, neighbour.class). Errors name the neighbour id.
std::vector<HalfPlaneConstraint> gather_constraints(const AgentState& self, std::span<const AgentState> neighbors,
                                                    const ResponsibilityMatrix& matrix, double tau, double dt);

}  // namespace orcasim
