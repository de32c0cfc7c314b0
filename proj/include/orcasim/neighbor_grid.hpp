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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "orcasim/agent.hpp"
#include "orcasim/vec2.hpp"

namespace orcasim {

struct CellCoord {
  std::int64_t x = 0;
  std::int64_t y = 0;
  bool operator==(const CellCoord&) const = default;
};

struct CellCoordHash {
  std::size_t operator()(const CellCoord& c) const noexcept {
    const auto h = static_cast<std::uint64_t>(c.x) * 0x9e3779b97f4a7c15ULL ^
                   (static_cast<std::uint64_t>(c.y) + 0x632be59bd9b4e019ULL) * 0xbf58476d1ce4e5b9ULL;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

/// A neighbour candidate: index into the agent list plus its squared
/// centre distance from the querying agent.
struct NeighborHit {
  std::size_t index = 0;
  double dist_sq = 0.0;
};

/// Sparse uniform grid over agent centres. Cell of a point is
/// floor((p - origin) / cell_size) per axis. Members are stored as indices
/// into the agent list the grid was built from, ordered by agent id.
class UniformGrid {
 public:
  /// Throws ValidationError for cell_size <= 0, non-finite positions (naming
  /// the agent id) or duplicate ids.
  static UniformGrid rebuild(std::span<const AgentState> agents, double cell_size, Vec2 origin = {});

  double cell_size() const noexcept { return cell_size_; }
  Vec2 origin() const noexcept { return origin_; }
  std::size_t population() const noexcept { return sorted_.size(); }
  std::size_t cell_count() const noexcept { return cells_.size(); }

  CellCoord cell_of(Vec2 p) const;
  /// Agent indices in the given cell; empty if the cell is unoccupied.
  std::span<const std::size_t> members(CellCoord cell) const;
  /// Every occupied cell (unordered).
  std::vector<CellCoord> occupied_cells() const;
  /// Index of the agent with this id, if present.
  const std::size_t* find(AgentId id) const;

  /// Up to max_count agents with squared distance <= radius^2 from
  /// agents[self_index], excluding it, ordered by (dist_sq, id). `agents`
  /// must be the list the grid was built from.
  void query(std::span<const AgentState> agents, std::size_t self_index, double radius, std::size_t max_count,
             std::vector<NeighborHit>& out) const;

  /// Visits every pair (i < j by index) whose squared distance <= radius^2.
  template <typename Fn>
  void for_each_pair_within(std::span<const AgentState> agents, double radius, Fn&& fn) const;

 private:
  struct Range {
    std::size_t begin = 0;
    std::size_t end = 0;
  };

  Range range_of(CellCoord cell) const;

  double cell_size_ = 1.0;
  Vec2 origin_;
  std::vector<std::size_t> sorted_;  // agent indices grouped by cell, then id
  std::vector<Vec2> sorted_positions_;  // positions in sorted_ order
  std::unordered_map<CellCoord, Range, CellCoordHash> cells_;
  // Start offsets for every cell of the occupied block, row-major in x, when
  // the block is small relative to the population; empty otherwise.
  CellCoord dense_min_;
  std::int64_t dense_height_ = 0;
  std::int64_t dense_width_ = 0;
  std::vector<std::size_t> dense_start_;
  std::unordered_map<AgentId, std::size_t> index_of_;
};

/// Neighbours of `self_id` as agent copies, nearest first (ties by id).
/// Throws ValidationError if self_id is unknown, radius <= 0.
std::vector<AgentState> query_neighbors(const UniformGrid& grid, std::span<const AgentState> agents, AgentId self_id,
                                        double radius, std::size_t max_count);

template <typename Fn>
void UniformGrid::for_each_pair_within(std::span<const AgentState> agents, double radius, Fn&& fn) const {
  const double radius_sq = radius * radius;
  const auto reach = static_cast<std::int64_t>(std::ceil(radius / cell_size_));
  for (const auto& [cell, range] : cells_) {
    for (std::int64_t dx = -reach; dx <= reach; ++dx) {
      for (std::int64_t dy = -reach; dy <= reach; ++dy) {
        const Range other = range_of({cell.x + dx, cell.y + dy});
        for (std::size_t a = range.begin; a < range.end; ++a) {
          const std::size_t i = sorted_[a];
          for (std::size_t b = other.begin; b < other.end; ++b) {
            const std::size_t j = sorted_[b];
            if (i >= j) continue;
            if (abs_sq(agents[j].position - agents[i].position) <= radius_sq) fn(i, j);
          }
        }
      }
    }
  }
}

}  // namespace orcasim
