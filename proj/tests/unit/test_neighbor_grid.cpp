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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "orcasim/errors.hpp"
#include "orcasim/neighbor_grid.hpp"

namespace orcasim {
namespace {

std::vector<AgentState> random_agents(std::size_t n, double extent, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-extent, extent);
  std::vector<AgentState> agents(n);
  for (std::size_t i = 0; i < n; ++i) {
    agents[i].id = 1000 + 7 * i;
    agents[i].position = {d(rng), d(rng)};
    agents[i].radius = 0.25;
  }
  return agents;
}

std::vector<AgentId> brute_force(const std::vector<AgentState>& agents, std::size_t self, double radius,
                                 std::size_t max_count) {
  std::vector<std::pair<double, AgentId>> all;
  for (std::size_t j = 0; j < agents.size(); ++j) {
    if (j == self) continue;
    const double dx = agents[j].position.x - agents[self].position.x;
    const double dy = agents[j].position.y - agents[self].position.y;
    const double d2 = dx * dx + dy * dy;
    if (d2 <= radius * radius) all.emplace_back(d2, agents[j].id);
  }
  std::sort(all.begin(), all.end());
  if (all.size() > max_count) all.resize(max_count);
  std::vector<AgentId> ids;
  for (const auto& [d2, id] : all) ids.push_back(id);
  return ids;
}

std::vector<AgentId> grid_ids(const UniformGrid& grid, const std::vector<AgentState>& agents, std::size_t self,
                              double radius, std::size_t max_count) {
  std::vector<AgentId> ids;
  for (const auto& a : query_neighbors(grid, agents, agents[self].id, radius, max_count)) ids.push_back(a.id);
  return ids;
}

TEST(Grid, TwoAgentsSeeEachOther) {
  std::vector<AgentState> agents(2);
  agents[0].id = 1;
  agents[1].id = 2;
  agents[1].position = {1.0, 0.0};
  const UniformGrid grid = UniformGrid::rebuild(agents, 5.0);
  EXPECT_EQ(grid_ids(grid, agents, 0, 5.0, 16), std::vector<AgentId>{2});
  EXPECT_EQ(grid_ids(grid, agents, 1, 5.0, 16), std::vector<AgentId>{1});
  EXPECT_TRUE(grid_ids(grid, agents, 0, 0.5, 16).empty());
}

TEST(Grid, MatchesBruteForce) {
  const auto agents = random_agents(200, 10.0, 1);
  const UniformGrid grid = UniformGrid::rebuild(agents, 3.0);
  for (std::size_t i = 0; i < agents.size(); ++i) {
    ASSERT_EQ(grid_ids(grid, agents, i, 3.0, 16), brute_force(agents, i, 3.0, 16)) << "agent " << i;
  }
}

TEST(Grid, MatchesBruteForceAcrossRadiiAndCounts) {
  const auto agents = random_agents(300, 15.0, 2);
  for (double radius : {0.5, 2.0, 7.5, 40.0}) {
    const UniformGrid grid = UniformGrid::rebuild(agents, radius);
    for (std::size_t max_count : {0U, 1U, 5U, 16U, 1000U}) {
      for (std::size_t i = 0; i < agents.size(); i += 13) {
        ASSERT_EQ(grid_ids(grid, agents, i, radius, max_count), brute_force(agents, i, radius, max_count))
            << "radius " << radius << " max " << max_count << " agent " << i;
      }
    }
  }
}

TEST(Grid, IndependentOfCellSize) {
  const auto agents = random_agents(250, 12.0, 3);
  const double r = 3.0;
  const UniformGrid reference = UniformGrid::rebuild(agents, r);
  for (double scale : {0.5, 1.0, 2.0, 5.0}) {
    const UniformGrid grid = UniformGrid::rebuild(agents, scale * r, {0.37, -1.2});
    for (std::size_t i = 0; i < agents.size(); ++i) {
      ASSERT_EQ(grid_ids(grid, agents, i, r, 10), grid_ids(reference, agents, i, r, 10)) << "scale " << scale;
    }
  }
}

TEST(Grid, UntruncatedQueriesAreSymmetric) {
  const auto agents = random_agents(150, 8.0, 4);
  const UniformGrid grid = UniformGrid::rebuild(agents, 2.5);
  for (std::size_t i = 0; i < agents.size(); ++i) {
    for (AgentId other : grid_ids(grid, agents, i, 2.5, agents.size())) {
      const std::size_t j = *grid.find(other);
      const auto back = grid_ids(grid, agents, j, 2.5, agents.size());
      EXPECT_NE(std::find(back.begin(), back.end(), agents[i].id), back.end());
    }
  }
}

TEST(Grid, BoundaryDistanceIsIncluded) {
  std::vector<AgentState> agents(2);
  agents[0].id = 0;
  agents[1].id = 1;
  agents[1].position = {3.0, 4.0};
  const UniformGrid grid = UniformGrid::rebuild(agents, 5.0);
  EXPECT_EQ(grid_ids(grid, agents, 0, 5.0, 4).size(), 1U);
}

TEST(Grid, TiesBrokenById) {
  std::vector<AgentState> agents(5);
  const std::vector<Vec2> ring{{0, 0}, {1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const std::vector<AgentId> ids{50, 40, 10, 30, 20};
  for (std::size_t i = 0; i < 5; ++i) {
    agents[i].id = ids[i];
    agents[i].position = ring[i];
  }
  const UniformGrid grid = UniformGrid::rebuild(agents, 1.0);
  EXPECT_EQ(grid_ids(grid, agents, 0, 1.0, 3), (std::vector<AgentId>{10, 20, 30}));
}

TEST(Grid, EveryAgentStoredOnce) {
  const auto agents = random_agents(400, 20.0, 5);
  const UniformGrid grid = UniformGrid::rebuild(agents, 1.5);
  EXPECT_EQ(grid.population(), agents.size());
  std::multiset<std::size_t> seen;
  for (const CellCoord& c : grid.occupied_cells()) {
    const auto members = grid.members(c);
    EXPECT_TRUE(std::is_sorted(members.begin(), members.end(),
                               [&](std::size_t a, std::size_t b) { return agents[a].id < agents[b].id; }));
    for (std::size_t i : members) {
      EXPECT_EQ(grid.cell_of(agents[i].position), c);
      seen.insert(i);
    }
  }
  EXPECT_EQ(seen.size(), agents.size());
  EXPECT_EQ(std::set<std::size_t>(seen.begin(), seen.end()).size(), agents.size());
}

TEST(Grid, NegativeCoordinatesUseFloor) {
  std::vector<AgentState> agents(1);
  agents[0].position = {-0.1, -2.5};
  const UniformGrid grid = UniformGrid::rebuild(agents, 1.0);
  EXPECT_EQ(grid.cell_of(agents[0].position), (CellCoord{-1, -3}));
}

TEST(Grid, PairVisitorMatchesBruteForce) {
  const auto agents = random_agents(200, 10.0, 6);
  const UniformGrid grid = UniformGrid::rebuild(agents, 1.7);
  std::set<std::pair<std::size_t, std::size_t>> found;
  grid.for_each_pair_within(agents, 2.3, [&](std::size_t i, std::size_t j) {
    EXPECT_TRUE(found.emplace(i, j).second);
  });
  std::set<std::pair<std::size_t, std::size_t>> expected;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    for (std::size_t j = i + 1; j < agents.size(); ++j) {
      if (abs_sq(agents[j].position - agents[i].position) <= 2.3 * 2.3) expected.emplace(i, j);
    }
  }
  EXPECT_EQ(found, expected);
}

TEST(Grid, RejectsBadInput) {
  auto agents = random_agents(3, 1.0, 7);
  EXPECT_THROW(UniformGrid::rebuild(agents, 0.0), ValidationError);
  agents[1].position.x = std::nan("");
  try {
    UniformGrid::rebuild(agents, 1.0);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.where(), "agent " + std::to_string(agents[1].id));
  }
  agents[1].position.x = 0.0;
  agents[2].id = agents[0].id;
  EXPECT_THROW(UniformGrid::rebuild(agents, 1.0), ValidationError);

  const auto ok = random_agents(3, 1.0, 8);
  const UniformGrid grid = UniformGrid::rebuild(ok, 1.0);
  EXPECT_THROW(query_neighbors(grid, ok, 424242, 1.0, 4), ValidationError);
  EXPECT_THROW(query_neighbors(grid, ok, ok[0].id, -1.0, 4), ValidationError);
}

}  // namespace
}  // namespace orcasim
