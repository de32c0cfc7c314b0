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

#include "orcasim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "orcasim/engine.hpp"
#include "orcasim/neighbor_grid.hpp"

namespace orcasim {
namespace {

using nlohmann::json;

constexpr std::array<AgentClass, kAgentClassCount> kAllClasses{AgentClass::Pedestrian, AgentClass::Vehicle};

std::string cls(AgentClass c) { return std::string(to_string(c)); }

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw ValidationError(where, what); }

void reject_unknown_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end()) {
      fail(path.empty() ? key : path + "." + key, "unknown field");
    }
  }
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  return j;
}

double read_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "non-finite number");
  return v;
}

std::uint64_t read_unsigned(const json& j, const std::string& path) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
    fail(path, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

Vec2 read_point(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(path, "expected [x, y]");
  return {read_number(j[0], path + "[0]"), read_number(j[1], path + "[1]")};
}

Rect read_rect(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown_keys(j, path, {"min", "max"});
  if (!j.contains("min") || !j.contains("max")) fail(path, "expected {\"min\": [x, y], \"max\": [x, y]}");
  return {read_point(j["min"], path + ".min"), read_point(j["max"], path + ".max")};
}

AgentClass read_class(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected \"pedestrian\" or \"vehicle\"");
  const auto parsed = parse_agent_class(j.get<std::string>());
  if (!parsed) fail(path, "unknown agent class '" + j.get<std::string>() + "'");
  return *parsed;
}

json point_json(Vec2 p) { return json::array({p.x, p.y}); }
json rect_json(const Rect& r) { return {{"min", point_json(r.min)}, {"max", point_json(r.max)}}; }

void check_positive(double v, const std::string& path) {
  if (!std::isfinite(v) || v <= 0.0) fail(path, "must be positive");
}

// Flat hash grid of placed discs used for rejection tests.
class PlacementIndex {
 public:
  explicit PlacementIndex(double cell) : cell_(cell) {}

  void add(const PlacedDisc& d) {
    discs_.push_back(d);
    cells_[key(d.position)].push_back(discs_.size() - 1);
  }

  bool clear_of(Vec2 p, double radius, double pref_speed, double clearance_time) const {
    const CellCoord c = key(p);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = cells_.find({c.x + dx, c.y + dy});
        if (it == cells_.end()) continue;
        for (std::size_t k : it->second) {
          const PlacedDisc& d = discs_[k];
          const double required = radius + d.radius + std::max(pref_speed, d.pref_speed) * clearance_time;
          if (abs_sq(p - d.position) < required * required) return false;
        }
      }
    }
    return true;
  }

 private:
  CellCoord key(Vec2 p) const {
    return {static_cast<std::int64_t>(std::floor(p.x / cell_)), static_cast<std::int64_t>(std::floor(p.y / cell_))};
  }

  double cell_;
  std::vector<PlacedDisc> discs_;
  std::unordered_map<CellCoord, std::vector<std::size_t>, CellCoordHash> cells_;
};

}  // namespace

std::size_t ScenarioConfig::total_agents() const {
  std::size_t n = 0;
  for (const auto& r : regions) n += r.count;
  return n;
}

std::size_t ScenarioConfig::effective_max_frames() const {
  if (max_frames > 0) return max_frames;
  if (regions.empty()) return 1;
  Vec2 lo = regions.front().spawn.min;
  Vec2 hi = regions.front().spawn.max;
  double slowest = std::numeric_limits<double>::infinity();
  for (const auto& r : regions) {
    for (const Rect& rect : {r.spawn, r.goal}) {
      lo = {std::min(lo.x, rect.min.x), std::min(lo.y, rect.min.y)};
      hi = {std::max(hi.x, rect.max.x), std::max(hi.y, rect.max.y)};
    }
    slowest = std::min(slowest, params(r.agent_class).pref_speed);
  }
  const double frames = 100.0 * (norm(hi - lo) / slowest) / dt;
  return static_cast<std::size_t>(std::ceil(frames));
}

void validate(ScenarioConfig& config) {
  if (config.format_version != kScenarioFormatVersion) {
    fail("format_version", "unsupported version " + std::to_string(config.format_version));
  }
  check_positive(config.dt, "dt");
  check_positive(config.tau, "tau");
  check_positive(config.neighbor_radius, "neighbor_radius");
  if (!std::isfinite(config.goal_tolerance)) fail("goal_tolerance", "non-finite number");
  if (!std::isfinite(config.clearance_time) || config.clearance_time < 0.0) {
    fail("clearance_time", "must be non-negative");
  }
  for (AgentClass c : kAllClasses) {
    const ClassParams& p = config.params(c);
    const std::string path = "classes." + cls(c);
    check_positive(p.radius, path + ".radius");
    check_positive(p.pref_speed, path + ".pref_speed");
    check_positive(p.max_speed, path + ".max_speed");
    if (p.pref_speed > p.max_speed) fail(path + ".pref_speed", "exceeds max_speed");
  }
  std::set<AgentClass> used;
  for (std::size_t i = 0; i < config.regions.size(); ++i) {
    const auto& r = config.regions[i];
    const std::string path = "regions[" + std::to_string(i) + "]";
    for (const auto& [rect, name] : {std::pair{r.spawn, ".spawn"}, std::pair{r.goal, ".goal"}}) {
      if (!is_finite(rect.min) || !is_finite(rect.max)) fail(path + name, "non-finite coordinate");
      if (!(rect.max.x > rect.min.x) || !(rect.max.y > rect.min.y)) fail(path + name, "degenerate rectangle");
    }
    if (r.count > 0) used.insert(r.agent_class);
  }

  config.warnings.clear();
  for (AgentClass a : used) {
    for (AgentClass b : used) {
      if (a > b) continue;
      if (!config.responsibility.guarantees(a, b)) {
        config.warnings.push_back("responsibility " + cls(a) + "|" + cls(b) + " + " + cls(b) + "|" + cls(a) +
                                  " < 1: collision-free motion is not guaranteed for this pair");
      }
    }
  }
  if (config.dt > config.tau) {
    config.warnings.push_back("dt exceeds tau: collision-free motion is not guaranteed");
  }
}

ScenarioConfig parse_scenario(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    fail(source, std::string("parse error: ") + e.what());
  }

  ScenarioConfig config;
  try {
    require_object(doc, "<root>");
    reject_unknown_keys(doc, "",
                        {"format_version", "seed", "dt", "tau", "neighbor_radius", "max_neighbors", "goal_tolerance",
                         "clearance_time", "max_frames", "classes", "responsibility", "regions"});
    if (!doc.contains("format_version")) fail("format_version", "missing");
    config.format_version = static_cast<int>(read_unsigned(doc["format_version"], "format_version"));
    if (doc.contains("seed")) config.seed = read_unsigned(doc["seed"], "seed");
    if (doc.contains("dt")) config.dt = read_number(doc["dt"], "dt");
    if (doc.contains("tau")) config.tau = read_number(doc["tau"], "tau");
    if (doc.contains("neighbor_radius")) config.neighbor_radius = read_number(doc["neighbor_radius"], "neighbor_radius");
    if (doc.contains("max_neighbors")) config.max_neighbors = read_unsigned(doc["max_neighbors"], "max_neighbors");
    if (doc.contains("goal_tolerance")) {
      config.goal_tolerance = read_number(doc["goal_tolerance"], "goal_tolerance");
      check_positive(config.goal_tolerance, "goal_tolerance");
    }
    if (doc.contains("clearance_time")) config.clearance_time = read_number(doc["clearance_time"], "clearance_time");
    if (doc.contains("max_frames")) config.max_frames = read_unsigned(doc["max_frames"], "max_frames");

    if (doc.contains("classes")) {
      const json& classes = require_object(doc["classes"], "classes");
      reject_unknown_keys(classes, "classes", {"pedestrian", "vehicle"});
      for (AgentClass c : kAllClasses) {
        if (!classes.contains(cls(c))) continue;
        const std::string path = "classes." + cls(c);
        const json& entry = require_object(classes[cls(c)], path);
        reject_unknown_keys(entry, path, {"radius", "pref_speed", "max_speed"});
        ClassParams& p = config.params(c);
        if (entry.contains("radius")) p.radius = read_number(entry["radius"], path + ".radius");
        if (entry.contains("pref_speed")) p.pref_speed = read_number(entry["pref_speed"], path + ".pref_speed");
        if (entry.contains("max_speed")) p.max_speed = read_number(entry["max_speed"], path + ".max_speed");
      }
    }

    if (!doc.contains("regions")) fail("regions", "missing");
    const json& regions = doc["regions"];
    if (!regions.is_array()) fail("regions", "expected a list");
    for (std::size_t i = 0; i < regions.size(); ++i) {
      const std::string path = "regions[" + std::to_string(i) + "]";
      const json& r = require_object(regions[i], path);
      reject_unknown_keys(r, path, {"class", "count", "spawn", "goal"});
      for (const char* key : {"class", "count", "spawn", "goal"}) {
        if (!r.contains(key)) fail(path + "." + key, "missing");
      }
      SpawnRegion region;
      region.agent_class = read_class(r["class"], path + ".class");
      region.count = read_unsigned(r["count"], path + ".count");
      region.spawn = read_rect(r["spawn"], path + ".spawn");
      region.goal = read_rect(r["goal"], path + ".goal");
      config.regions.push_back(region);
    }

    if (doc.contains("responsibility")) {
      const json& resp = require_object(doc["responsibility"], "responsibility");
      reject_unknown_keys(resp, "responsibility", {"pedestrian", "vehicle"});
      std::set<AgentClass> used;
      for (const auto& r : config.regions) {
        if (r.count > 0) used.insert(r.agent_class);
      }
      for (AgentClass a : kAllClasses) {
        const std::string row_path = "responsibility." + cls(a);
        const bool row_present = resp.contains(cls(a));
        if (row_present) {
          require_object(resp[cls(a)], row_path);
          reject_unknown_keys(resp[cls(a)], row_path, {"pedestrian", "vehicle"});
        }
        for (AgentClass b : kAllClasses) {
          const std::string path = row_path + "." + cls(b);
          if (row_present && resp[cls(a)].contains(cls(b))) {
            config.responsibility.set(a, b, read_number(resp[cls(a)][cls(b)], path));
          } else if (used.count(a) && used.count(b)) {
            fail(path, "missing entry; matrix must cover every class pair in use");
          }
        }
      }
    }

    validate(config);
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.where(), e.detail());
  } catch (const json::exception& e) {
    fail(source, e.what());
  }
  return config;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scenario file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path.string());
}

std::string scenario_to_json(const ScenarioConfig& config) {
  json doc;
  doc["format_version"] = config.format_version;
  doc["seed"] = config.seed;
  doc["dt"] = config.dt;
  doc["tau"] = config.tau;
  doc["neighbor_radius"] = config.neighbor_radius;
  doc["max_neighbors"] = config.max_neighbors;
  if (config.goal_tolerance > 0.0) doc["goal_tolerance"] = config.goal_tolerance;
  doc["clearance_time"] = config.clearance_time;
  if (config.max_frames > 0) doc["max_frames"] = config.max_frames;
  for (AgentClass c : kAllClasses) {
    const ClassParams& p = config.params(c);
    doc["classes"][cls(c)] = {{"radius", p.radius}, {"pref_speed", p.pref_speed}, {"max_speed", p.max_speed}};
    for (AgentClass o : kAllClasses) doc["responsibility"][cls(c)][cls(o)] = config.responsibility.get(c, o);
  }
  doc["regions"] = json::array();
  for (const auto& r : config.regions) {
    doc["regions"].push_back(
        {{"class", cls(r.agent_class)}, {"count", r.count}, {"spawn", rect_json(r.spawn)}, {"goal", rect_json(r.goal)}});
  }
  return doc.dump(2) + "\n";
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Vec2 uniform_point(const Rect& rect, Rng& rng) {
  const double u = uniform01(rng);
  const double v = uniform01(rng);
  return {rect.min.x + u * rect.width(), rect.min.y + v * rect.height()};
}

std::vector<Vec2> sample_spawns(const Rect& region, std::size_t count, double radius, double pref_speed,
                                double clearance_time, Rng& rng, std::span<const PlacedDisc> occupied) {
  check_positive(radius, "radius");
  check_positive(pref_speed, "pref_speed");
  if (!std::isfinite(clearance_time) || clearance_time < 0.0) fail("clearance_time", "must be non-negative");
  if (!(region.width() > 0.0) || !(region.height() > 0.0)) fail("region", "degenerate rectangle");

  double cell = 2.0 * radius + pref_speed * clearance_time;
  for (const auto& d : occupied) {
    cell = std::max(cell, radius + d.radius + std::max(pref_speed, d.pref_speed) * clearance_time);
  }
  PlacementIndex index(cell);
  for (const auto& d : occupied) index.add(d);

  std::vector<Vec2> points;
  points.reserve(count);
  const std::size_t max_attempts = 1000 + 500 * count;
  for (std::size_t attempt = 0; attempt < max_attempts && points.size() < count; ++attempt) {
    const Vec2 p = uniform_point(region, rng);
    if (!index.clear_of(p, radius, pref_speed, clearance_time)) continue;
    index.add({p, radius, pref_speed});
    points.push_back(p);
  }
  if (points.size() < count) throw SpawnError(points.size(), count);
  return points;
}

std::vector<AgentState> make_initial_agents(const ScenarioConfig& config) {
  Rng rng(config.seed);
  std::vector<AgentState> agents;
  agents.reserve(config.total_agents());
  std::vector<PlacedDisc> placed;
  placed.reserve(config.total_agents());

  for (std::size_t i = 0; i < config.regions.size(); ++i) {
    const SpawnRegion& region = config.regions[i];
    const ClassParams& p = config.params(region.agent_class);
    std::vector<Vec2> spawns;
    try {
      spawns = sample_spawns(region.spawn, region.count, p.radius, p.pref_speed, config.clearance_time, rng, placed);
    } catch (const SpawnError& e) {
      throw ValidationError("regions[" + std::to_string(i) + "].spawn", e.detail());
    }
    for (Vec2 s : spawns) {
      AgentState a;
      a.id = agents.size();
      a.position = s;
      a.radius = p.radius;
      a.pref_speed = p.pref_speed;
      a.max_speed = p.max_speed;
      a.agent_class = region.agent_class;
      agents.push_back(a);
      placed.push_back({s, p.radius, p.pref_speed});
    }
    for (std::size_t k = agents.size() - spawns.size(); k < agents.size(); ++k) {
      agents[k].goal = uniform_point(region.goal, rng);
      agents[k].velocity = desired_velocity(agents[k], config.dt);
    }
  }
  return agents;
}

ScenarioConfig make_crossing(CrossingKind kind, std::size_t agents_per_arm, double vehicle_fraction,
                             std::uint64_t seed) {
  if (!std::isfinite(vehicle_fraction) || vehicle_fraction < 0.0 || vehicle_fraction > 1.0) {
    fail("vehicle_fraction", "must lie in [0, 1]");
  }
  ScenarioConfig config;
  config.seed = seed;

  const auto vehicles = static_cast<std::size_t>(std::llround(static_cast<double>(agents_per_arm) * vehicle_fraction));
  const std::size_t pedestrians = agents_per_arm - vehicles;

  // Area per agent ~ 2.5 x the square of its required spawn spacing.
  auto footprint = [&](AgentClass c) {
    const ClassParams& p = config.params(c);
    const double spacing = 2.0 * p.radius + p.pref_speed * config.clearance_time;
    return 2.5 * spacing * spacing;
  };
  const double area = static_cast<double>(pedestrians) * footprint(AgentClass::Pedestrian) +
                      static_cast<double>(vehicles) * footprint(AgentClass::Vehicle);
  const double side = std::max(std::sqrt(area), 8.0);
  const double gap = 0.5 * side + 5.0;
  const double half = 0.5 * side;

  std::vector<Rect> arms{
      Rect{{-gap - side, -half}, {-gap, half}},  // west
      Rect{{gap, -half}, {gap + side, half}},    // east
  };
  if (kind == CrossingKind::FourWay) {
    arms.push_back(Rect{{-half, -gap - side}, {half, -gap}});  // south
    arms.push_back(Rect{{-half, gap}, {half, gap + side}});    // north
  }
  auto opposite = [](std::size_t arm) { return arm ^ 1U; };

  for (AgentClass c : {AgentClass::Vehicle, AgentClass::Pedestrian}) {
    const std::size_t count = c == AgentClass::Vehicle ? vehicles : pedestrians;
    if (count == 0) continue;
    for (std::size_t arm = 0; arm < arms.size(); ++arm) {
      config.regions.push_back(SpawnRegion{arms[arm], arms[opposite(arm)], c, count});
    }
  }
  validate(config);
  return config;
}

}  // namespace orcasim
