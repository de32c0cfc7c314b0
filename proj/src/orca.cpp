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

#include "orcasim/orca.hpp"

#include <cmath>
#include <string>

#include "orcasim/errors.hpp"

namespace orcasim {
namespace {

void require_positive(double value, const char* name) {
  if (!std::isfinite(value) || value <= 0.0) throw ValidationError(name, "must be finite and positive");
}

// Exit through a disc boundary (cutoff or overlap disc) for w = v - centre.
VoExit disc_exit(Vec2 w, Vec2 rel_position, double disc_radius, VoRegion region) {
  const double w_len = norm(w);
  // Relative velocity exactly at the centre: leave toward the origin side.
  const Vec2 unit_w = w_len > 0.0 ? w / w_len : -normalize(rel_position);
  return {(disc_radius - w_len) * unit_w, unit_w, region};
}

}  // namespace

VoExit compute_vo_exit(Vec2 rel_position, Vec2 rel_velocity, double combined_radius, double tau, double dt) {
  if (!is_finite(rel_position)) throw ValidationError("rel_position", "non-finite coordinate");
  if (!is_finite(rel_velocity)) throw ValidationError("rel_velocity", "non-finite coordinate");
  require_positive(combined_radius, "combined_radius");
  require_positive(tau, "tau");
  require_positive(dt, "dt");

  const double dist_sq = abs_sq(rel_position);
  if (dist_sq == 0.0) throw ValidationError("rel_position", "coincident centres, avoidance direction undefined");
  const double radius_sq = combined_radius * combined_radius;

  if (dist_sq <= radius_sq) {
    const double inv_dt = 1.0 / dt;
    return disc_exit(rel_velocity - inv_dt * rel_position, rel_position, combined_radius * inv_dt,
                     VoRegion::OverlapDisc);
  }

  const double inv_tau = 1.0 / tau;
  // From the cutoff centre to the relative velocity.
  const Vec2 w = rel_velocity - inv_tau * rel_position;
  const double w_len_sq = abs_sq(w);
  const double w_dot_p = dot(w, rel_position);

  if (w_len_sq == 0.0 || (w_dot_p < 0.0 && w_dot_p * w_dot_p > radius_sq * w_len_sq)) {
    return disc_exit(w, rel_position, combined_radius * inv_tau, VoRegion::CutoffDisc);
  }

  const double leg = std::sqrt(dist_sq - radius_sq);
  const Vec2 p = rel_position;
  Vec2 direction;
  VoRegion region;
  if (det(p, w) > 0.0) {
    direction = Vec2(p.x * leg - p.y * combined_radius, p.x * combined_radius + p.y * leg) / dist_sq;
    region = VoRegion::LeftLeg;
  } else {
    direction = -Vec2(p.x * leg + p.y * combined_radius, -p.x * combined_radius + p.y * leg) / dist_sq;
    region = VoRegion::RightLeg;
  }
  const Vec2 u = dot(rel_velocity, direction) * direction - rel_velocity;
  return {u, perp(direction), region};
}

HalfPlaneConstraint build_orca_halfplane(const AgentState& self, const AgentState& other, double f, double tau,
                                         double dt) {
  if (!std::isfinite(f) || f < 0.0 || f > 1.0) throw ValidationError("f", "fraction must lie in [0, 1]");
  if (self.id == other.id) throw ValidationError("other", "agent cannot avoid itself");
  const VoExit exit = compute_vo_exit(other.position - self.position, self.velocity - other.velocity,
                                      self.radius + other.radius, tau, dt);
  return {self.velocity + f * exit.u, exit.normal};
}

std::vector<HalfPlaneConstraint> gather_constraints(const AgentState& self, std::span<const AgentState> neighbors,
                                                    const ResponsibilityMatrix& matrix, double tau, double dt) {
  std::vector<HalfPlaneConstraint> out;
  out.reserve(neighbors.size());
  for (const AgentState& other : neighbors) {
    try {
      out.push_back(build_orca_halfplane(self, other, matrix.get(self.agent_class, other.agent_class), tau, dt));
    } catch (const ValidationError& e) {
      throw ValidationError("neighbor " + std::to_string(other.id) + "." + e.where(), e.detail());
    }
  }
  return out;
}

}  // namespace orcasim
