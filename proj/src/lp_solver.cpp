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

#include "orcasim/lp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "orcasim/errors.hpp"
#include "orcasim/worker_pool.hpp"

namespace orcasim {
namespace {

constexpr double kParallelEpsilon = 1e-12;
constexpr double kTieBreakSlack = 1e-9;

// Constraint boundary as a directed line; permitted velocities lie to the left.
struct Line {
  Vec2 point;
  Vec2 dir;
};

Line to_line(const HalfPlaneConstraint& c) {
  return {c.boundary_point, {c.outward_normal.y, -c.outward_normal.x}};
}

// Positive when v lies strictly on the forbidden (right) side.
double line_violation(const Line& l, Vec2 v) { return det(l.dir, l.point - v); }

Vec2 clamp_to_disc(Vec2 v, double radius) {
  const double len_sq = abs_sq(v);
  if (len_sq > radius * radius) return v * (radius / std::sqrt(len_sq));
  return v;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Optimises along line `k`, honouring lines [0, k) and the disc. Either
// closest point to `opt`, or (direction_opt) the extreme point in direction
// `opt`. Returns false if the feasible interval on the line is empty.
bool solve_on_line(std::span<const Line> lines, std::size_t k, double radius, Vec2 opt, bool direction_opt,
                   Vec2& result) {
  const Line& line = lines[k];
  const double along = dot(line.point, line.dir);
  const double discriminant = along * along + radius * radius - abs_sq(line.point);
  if (discriminant < 0.0) return false;  // disc misses the line entirely

  const double root = std::sqrt(discriminant);
  double t_left = -along - root;
  double t_right = -along + root;

  for (std::size_t j = 0; j < k; ++j) {
    const double denominator = det(line.dir, lines[j].dir);
    const double numerator = det(lines[j].dir, line.point - lines[j].point);

    if (std::fabs(denominator) <= kParallelEpsilon) {
      if (numerator < 0.0) return false;
      continue;
    }

    const double t = numerator / denominator;
    if (denominator >= 0.0) {
      t_right = std::min(t_right, t);
    } else {
      t_left = std::max(t_left, t);
    }
    if (t_left > t_right) return false;
  }

  double t;
  if (direction_opt) {
    t = dot(opt, line.dir) > 0.0 ? t_right : t_left;
  } else {
    t = std::clamp(dot(line.dir, opt - line.point), t_left, t_right);
  }
  result = line.point + t * line.dir;
  return true;
}

// Incremental 2D solve. Returns lines.size() on success, otherwise the
// position of the line that emptied the region (result then holds the
// optimum over the preceding lines).
std::size_t solve_incremental(std::span<const Line> lines, double radius, Vec2 opt, bool direction_opt,
                              Vec2& result) {
  if (direction_opt) {
    result = opt * radius;
  } else {
    result = clamp_to_disc(opt, radius);
  }

  for (std::size_t k = 0; k < lines.size(); ++k) {
    if (line_violation(lines[k], result) > 0.0) {
      const Vec2 previous = result;
      if (!solve_on_line(lines, k, radius, opt, direction_opt, result)) {
        result = previous;
        return k;
      }
    }
  }
  return lines.size();
}

// Minimax penetration via the lifted 3-variable program: each time a line
// is penetrated deeper than the current optimum, the new optimum lies where
// that line's penetration equals the worst of the earlier ones, found by a
// direction-optimising 2D solve over the bisector lines. Returns the
// optimal penetration, clamped below at zero.
double minimise_penetration(std::span<const Line> lines, std::size_t begin, double radius, Vec2& result,
                            std::vector<Line>& projected) {
  double distance = 0.0;
  for (std::size_t i = begin; i < lines.size(); ++i) {
    if (line_violation(lines[i], result) <= distance) continue;

    projected.clear();
    for (std::size_t j = 0; j < i; ++j) {
      Line bisector;
      const double determinant = det(lines[i].dir, lines[j].dir);
      if (std::fabs(determinant) <= kParallelEpsilon) {
        if (dot(lines[i].dir, lines[j].dir) > 0.0) continue;  // same direction: j never binds
        bisector.point = 0.5 * (lines[i].point + lines[j].point);
      } else {
        bisector.point =
            lines[i].point + (det(lines[j].dir, lines[i].point - lines[j].point) / determinant) * lines[i].dir;
      }
      bisector.dir = normalize(lines[j].dir - lines[i].dir);
      projected.push_back(bisector);
    }

    const Vec2 previous = result;
    if (solve_incremental(projected, radius, perp(lines[i].dir), true, result) < projected.size()) {
      // Only reachable through rounding; the previous point is still valid.
      result = previous;
    }
    distance = line_violation(lines[i], result);
  }
  return std::max(distance, 0.0);
}

struct Scratch {
  std::vector<Line> lines;
  std::vector<Line> projected;
  std::vector<Line> shifted;
  std::vector<std::size_t> order;
};

Scratch& scratch() {
  thread_local Scratch s;
  return s;
}

Vec2 least_penetration_on_lines(std::span<const Line> lines, double radius, std::size_t start, Vec2 warm_start,
                                Scratch& s) {
  Vec2 result = clamp_to_disc(warm_start, radius);
  for (std::size_t j = 0; j < start; ++j) {
    if (line_violation(lines[j], result) > kFeasibilitySlack) {
      start = 0;
      break;
    }
  }

  const double penetration = minimise_penetration(lines, start, radius, result, s.projected);

  // Among points within the optimal penetration, take the one closest to
  // warm_start.
  s.shifted.assign(lines.begin(), lines.end());
  const double shift = penetration + kTieBreakSlack;
  for (Line& l : s.shifted) l.point -= shift * perp(l.dir);
  Vec2 closest;
  if (solve_incremental(s.shifted, radius, warm_start, false, closest) == s.shifted.size()) {
    result = closest;
  }
  return clamp_to_disc(result, radius);
}

void validate_scalar(double value, const char* name) {
  if (!std::isfinite(value)) throw ValidationError(name, "non-finite value");
}

void validate_constraints(std::span<const HalfPlaneConstraint> constraints) {
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const auto& c = constraints[i];
    if (!is_finite(c.boundary_point) || !is_finite(c.outward_normal)) {
      throw ValidationError("constraint[" + std::to_string(i) + "]", "non-finite coordinate");
    }
    if (std::fabs(norm(c.outward_normal) - 1.0) > kNormalizationSlack) {
      throw ValidationError("constraint[" + std::to_string(i) + "]", "outward_normal is not unit length");
    }
  }
}

void validate_speed_cap(double speed_cap) {
  validate_scalar(speed_cap, "speed_cap");
  if (speed_cap <= 0.0) throw ValidationError("speed_cap", "must be positive");
}

}  // namespace

std::uint64_t problem_seed(std::uint64_t agent_id, std::uint64_t frame) {
  std::uint64_t state = frame;
  state = splitmix64(state) ^ agent_id;
  return splitmix64(state);
}

LpResult solve_closest_point(const LpProblem& problem) {
  if (!is_finite(problem.target)) throw ValidationError("target", "non-finite coordinate");
  validate_speed_cap(problem.speed_cap);
  validate_constraints(problem.constraints);

  const std::size_t n = problem.constraints.size();
  Scratch& s = scratch();

  // Deterministic Fisher-Yates insertion order keyed by the problem seed.
  s.order.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.order[i] = i;
  std::uint64_t rng = problem.shuffle_seed;
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>((static_cast<unsigned __int128>(splitmix64(rng)) * i) >> 64);
    std::swap(s.order[i - 1], s.order[j]);
  }
  s.lines.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.lines[i] = to_line(problem.constraints[s.order[i]]);

  LpResult out;
  const std::size_t failed = solve_incremental(s.lines, problem.speed_cap, problem.target, false, out.velocity);
  if (failed == n) {
    out.velocity = clamp_to_disc(out.velocity, problem.speed_cap);
    return out;
  }

  out.status = LpStatus::FallbackUsed;
  out.failed_at = s.order[failed];
  out.velocity = least_penetration_on_lines(s.lines, problem.speed_cap, failed, out.velocity, s);
  return out;
}

Vec2 solve_least_penetration(std::span<const HalfPlaneConstraint> constraints, double speed_cap,
                             std::size_t start_index, Vec2 warm_start) {
  validate_speed_cap(speed_cap);
  if (!is_finite(warm_start)) throw ValidationError("warm_start", "non-finite coordinate");
  validate_constraints(constraints);
  if (start_index > constraints.size()) throw ValidationError("start_index", "past the end of the constraint list");

  Scratch& s = scratch();
  std::vector<Line> lines(constraints.size());
  std::transform(constraints.begin(), constraints.end(), lines.begin(), to_line);
  return least_penetration_on_lines(lines, speed_cap, start_index, warm_start, s);
}

std::vector<std::pair<std::size_t, std::size_t>> make_work_units(std::span<const LpProblem> problems,
                                                                 std::size_t work_unit_steps) {
  std::vector<std::pair<std::size_t, std::size_t>> units;
  const std::size_t target = std::max<std::size_t>(work_unit_steps, 1);
  std::size_t begin = 0;
  std::size_t steps = 0;
  for (std::size_t i = 0; i < problems.size(); ++i) {
    steps += problems[i].constraints.size() + 1;
    if (steps >= target) {
      units.emplace_back(begin, i + 1);
      begin = i + 1;
      steps = 0;
    }
  }
  if (begin < problems.size()) units.emplace_back(begin, problems.size());
  return units;
}

std::vector<LpResult> solve_batch(std::span<const LpProblem> problems, WorkerPool& pool,
                                  std::size_t work_unit_steps) {
  std::vector<LpResult> results(problems.size());
  const auto units = make_work_units(problems, work_unit_steps);
  pool.parallel_for(units.size(), [&](std::size_t u) {
    for (std::size_t i = units[u].first; i < units[u].second; ++i) {
      try {
        results[i] = solve_closest_point(problems[i]);
      } catch (const ValidationError& e) {
        throw BatchValidationError(i, e);
      }
    }
  });
  return results;
}

std::vector<LpResult> solve_batch(std::span<const LpProblem> problems, std::size_t worker_count,
                                  std::size_t work_unit_steps) {
  if (worker_count == 0) throw ValidationError("worker_count", "must be at least 1");
  WorkerPool pool(worker_count);
  return solve_batch(problems, pool, work_unit_steps);
}

}  // namespace orcasim
