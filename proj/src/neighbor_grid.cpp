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

#include "orcasim/neighbor_grid.hpp"

#include <algorithm>
#include <string>

#include "orcasim/errors.hpp"

namespace orcasim {

CellCoord UniformGrid::cell_of(Vec2 p) const {
  return {static_cast<std::int64_t>(std::floor((p.x - origin_.x) / cell_size_)),
          static_cast<std::int64_t>(std::floor((p.y - origin_.y) / cell_size_))};
}

UniformGrid UniformGrid::rebuild(std::span<const AgentState> agents, double cell_size, Vec2 origin) {
  if (!std::isfinite(cell_size) || cell_size <= 0.0) throw ValidationError("cell_size", "must be positive");
  if (!is_finite(origin)) throw ValidationError("origin", "non-finite coordinate");

  UniformGrid grid;
  grid.cell_size_ = cell_size;
  grid.origin_ = origin;
  grid.index_of_.reserve(agents.size());

  std::vector<std::pair<CellCoord, std::size_t>> keyed;
  keyed.reserve(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (!is_finite(agents[i].position)) {
      throw ValidationError("agent " + std::to_string(agents[i].id), "non-finite position");
    }
    if (!grid.index_of_.emplace(agents[i].id, i).second) {
      throw ValidationError("agent " + std::to_string(agents[i].id), "duplicate id");
    }
    keyed.emplace_back(grid.cell_of(agents[i].position), i);
  }
  std::sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
    if (a.first.x != b.first.x) return a.first.x < b.first.x;
    if (a.first.y != b.first.y) return a.first.y < b.first.y;
    return agents[a.second].id < agents[b.second].id;
  });

  grid.sorted_.reserve(keyed.size());
  grid.sorted_positions_.reserve(keyed.size());
  for (std::size_t k = 0; k < keyed.size(); ++k) {
    grid.sorted_.push_back(keyed[k].second);
    grid.sorted_positions_.push_back(agents[keyed[k].second].position);
    if (k == 0 || !(keyed[k].first == keyed[k - 1].first)) {
      grid.cells_.emplace(keyed[k].first, Range{k, k + 1});
    } else {
      grid.cells_[keyed[k].first].end = k + 1;
    }
  }

  if (!keyed.empty()) {
    CellCoord lo = keyed.front().first;
    CellCoord hi = keyed.back().first;
    for (const auto& [cell, index] : keyed) {
      lo.y = std::min(lo.y, cell.y);
      hi.y = std::max(hi.y, cell.y);
    }
    const double width = static_cast<double>(hi.x) - static_cast<double>(lo.x) + 1.0;
    const double height = static_cast<double>(hi.y) - static_cast<double>(lo.y) + 1.0;
    if (width * height <= 8.0 * static_cast<double>(keyed.size()) + 4096.0) {
      grid.dense_min_ = lo;
      grid.dense_width_ = hi.x - lo.x + 1;
      grid.dense_height_ = hi.y - lo.y + 1;
      // keyed is sorted by (x, y), which is the dense row-major order.
      grid.dense_start_.assign(static_cast<std::size_t>(grid.dense_width_ * grid.dense_height_) + 1, 0);
      for (const auto& [cell, index] : keyed) {
        ++grid.dense_start_[static_cast<std::size_t>((cell.x - lo.x) * grid.dense_height_ + (cell.y - lo.y)) + 1];
      }
      for (std::size_t i = 1; i < grid.dense_start_.size(); ++i) grid.dense_start_[i] += grid.dense_start_[i - 1];
    }
  }
  return grid;
}

UniformGrid::Range UniformGrid::range_of(CellCoord cell) const {
  if (!dense_start_.empty()) {
    const std::int64_t dx = cell.x - dense_min_.x;
    const std::int64_t dy = cell.y - dense_min_.y;
    if (dx < 0 || dy < 0 || dx >= dense_width_ || dy >= dense_height_) return {};
    const auto i = static_cast<std::size_t>(dx * dense_height_ + dy);
    return {dense_start_[i], dense_start_[i + 1]};
  }
  const auto it = cells_.find(cell);
  return it == cells_.end() ? Range{} : it->second;
}

std::span<const std::size_t> UniformGrid::members(CellCoord cell) const {
  const Range r = range_of(cell);
  return std::span<const std::size_t>(sorted_).subspan(r.begin, r.end - r.begin);
}

std::vector<CellCoord> UniformGrid::occupied_cells() const {
  std::vector<CellCoord> out;
  out.reserve(cells_.size());
  for (const auto& [cell, range] : cells_) out.push_back(cell);
  return out;
}

const std::size_t* UniformGrid::find(AgentId id) const {
  const auto it = index_of_.find(id);
  return it == index_of_.end() ? nullptr : &it->second;
}

void UniformGrid::query(std::span<const AgentState> agents, std::size_t self_index, double radius,
                        std::size_t max_count, std::vector<NeighborHit>& out) const {
  out.clear();
  if (max_count == 0) return;
  const Vec2 centre = agents[self_index].position;
  const double radius_sq = radius * radius;
  const CellCoord home = cell_of(centre);
  const CellCoord lo = cell_of(centre - Vec2(radius, radius));
  const CellCoord hi = cell_of(centre + Vec2(radius, radius));

  const auto closer = [&](const NeighborHit& a, const NeighborHit& b) {
    if (a.dist_sq != b.dist_sq) return a.dist_sq < b.dist_sq;
    return agents[a.index].id < agents[b.index].id;
  };
  // `out` stays sorted and holds at most max_count hits. Candidates farther
  // than `bound_sq` cannot enter: it is the radius until the list is full,
  // then the current k-th distance.
  double bound_sq = radius_sq;
  auto visit = [&](const Range& range) {
    for (std::size_t k = range.begin; k < range.end; ++k) {
      const double d_sq = abs_sq(sorted_positions_[k] - centre);
      if (d_sq > bound_sq) continue;
      const std::size_t j = sorted_[k];
      if (j == self_index) continue;
      const NeighborHit hit{j, d_sq};
      if (out.size() == max_count) {
        if (!closer(hit, out.back())) continue;
        out.pop_back();
      }
      auto pos = out.end();
      while (pos != out.begin() && closer(hit, *(pos - 1))) --pos;
      out.insert(pos, hit);
      if (out.size() == max_count) bound_sq = out.back().dist_sq;
    }
  };

  const auto block = static_cast<double>(hi.x - lo.x + 1) * static_cast<double>(hi.y - lo.y + 1);
  if (dense_start_.empty() && block > static_cast<double>(cells_.size())) {
    // Sparse grid: cheaper to filter the occupied cells than to probe the block.
    for (const auto& [cell, range] : cells_) {
      if (cell.x >= lo.x && cell.x <= hi.x && cell.y >= lo.y && cell.y <= hi.y) visit(range);
    }
    return;
  }

  // Square rings of cells around the home cell, nearest first. Stops once the
  // k-th distance is closer than anything outside the visited block.
  const std::int64_t max_ring =
      std::max({home.x - lo.x, hi.x - home.x, home.y - lo.y, hi.y - home.y, std::int64_t{0}});
  const double margin = 1e-9 * cell_size_;
  auto axis_gap = [&](double from, std::int64_t cell, double origin) {
    const double c0 = origin + static_cast<double>(cell) * cell_size_;
    const double g = std::max(c0 - from, from - (c0 + cell_size_)) - margin;
    return g > 0.0 ? g * g : 0.0;
  };
  auto probe = [&](std::int64_t cx, std::int64_t cy) {
    if (cx < lo.x || cx > hi.x || cy < lo.y || cy > hi.y) return;
    if (axis_gap(centre.x, cx, origin_.x) + axis_gap(centre.y, cy, origin_.y) > bound_sq) return;
    visit(range_of({cx, cy}));
  };
  for (std::int64_t r = 0; r <= max_ring; ++r) {
    if (r == 0) {
      probe(home.x, home.y);
    } else {
      for (std::int64_t cx = home.x - r; cx <= home.x + r; ++cx) {
        probe(cx, home.y - r);
        probe(cx, home.y + r);
      }
      for (std::int64_t cy = home.y - r + 1; cy <= home.y + r - 1; ++cy) {
        probe(home.x - r, cy);
        probe(home.x + r, cy);
      }
    }
    if (out.size() == max_count) {
      const double gap = std::min({centre.x - (origin_.x + static_cast<double>(home.x - r) * cell_size_),
                                   origin_.x + static_cast<double>(home.x + r + 1) * cell_size_ - centre.x,
                                   centre.y - (origin_.y + static_cast<double>(home.y - r) * cell_size_),
                                   origin_.y + static_cast<double>(home.y + r + 1) * cell_size_ - centre.y}) -
                         margin;
      if (gap > 0.0 && bound_sq < gap * gap) break;
    }
  }
}

std::vector<AgentState> query_neighbors(const UniformGrid& grid, std::span<const AgentState> agents, AgentId self_id,
                                        double radius, std::size_t max_count) {
  if (!std::isfinite(radius) || radius <= 0.0) throw ValidationError("radius", "must be positive");
  const std::size_t* self = grid.find(self_id);
  if (self == nullptr || grid.population() != agents.size()) {
    throw ValidationError("self_id", "agent " + std::to_string(self_id) + " is not in the grid");
  }
  std::vector<NeighborHit> hits;
  grid.query(agents, *self, radius, max_count, hits);
  std::vector<AgentState> out;
  out.reserve(hits.size());
  for (const auto& h : hits) out.push_back(agents[h.index]);
  return out;
}

}  // namespace orcasim
