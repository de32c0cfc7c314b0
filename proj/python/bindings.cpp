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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <string>
#include <tuple>
#include <vector>

#include "orcasim/engine.hpp"
#include "orcasim/lp_solver.hpp"
#include "orcasim/orca.hpp"
#include "orcasim/scenario.hpp"
#include "orcasim/trajectory_io.hpp"

namespace py = pybind11;
using namespace orcasim;

namespace {

using Pair = std::tuple<double, double>;
using Plane = std::tuple<double, double, double, double>;

Vec2 vec(const Pair& p) { return {std::get<0>(p), std::get<1>(p)}; }
Pair pair(Vec2 v) { return {v.x, v.y}; }

LpProblem make_problem(const std::vector<Plane>& planes, const Pair& target, double speed_cap, std::uint64_t seed) {
  LpProblem p;
  p.target = vec(target);
  p.speed_cap = speed_cap;
  p.shuffle_seed = seed;
  p.constraints.reserve(planes.size());
  for (const auto& [px, py_, nx, ny] : planes) p.constraints.push_back({{px, py_}, {nx, ny}});
  return p;
}

py::dict result_dict(const LpResult& r) {
  py::dict d;
  d["velocity"] = pair(r.velocity);
  d["feasible"] = r.status == LpStatus::Feasible;
  d["failed_at"] = r.failed_at ? py::cast(*r.failed_at) : py::none();
  return d;
}

const char* region_name(VoRegion r) {
  switch (r) {
    case VoRegion::CutoffDisc: return "cutoff_disc";
    case VoRegion::LeftLeg: return "left_leg";
    case VoRegion::RightLeg: return "right_leg";
    case VoRegion::OverlapDisc: return "overlap_disc";
  }
  return "";
}

}  // namespace

PYBIND11_MODULE(_orcasim, m) {
  m.doc() = "Heterogeneous ORCA crowd simulation";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<SimulationError>(m, "SimulationError", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def(
      "solve_closest_point",
      [](const std::vector<Plane>& planes, const Pair& target, double speed_cap, std::uint64_t seed) {
        return result_dict(solve_closest_point(make_problem(planes, target, speed_cap, seed)));
      },
      py::arg("constraints"), py::arg("target"), py::arg("speed_cap"), py::arg("seed") = 0,
      "Closest velocity to `target` inside every half-plane (px, py, nx, ny) and the speed disc.");

  m.def(
      "solve_batch",
      [](const std::vector<std::tuple<std::vector<Plane>, Pair, double, std::uint64_t>>& problems,
         std::size_t workers) {
        std::vector<LpProblem> batch;
        batch.reserve(problems.size());
        for (const auto& [planes, target, cap, seed] : problems) batch.push_back(make_problem(planes, target, cap, seed));
        std::vector<LpResult> results;
        {
          py::gil_scoped_release release;
          results = solve_batch(batch, workers);
        }
        py::list out;
        for (const auto& r : results) out.append(result_dict(r));
        return out;
      },
      py::arg("problems"), py::arg("workers") = 1,
      "Solves (constraints, target, speed_cap, seed) tuples; results are independent of `workers`.");

  m.def(
      "compute_vo_exit",
      [](const Pair& rel_position, const Pair& rel_velocity, double combined_radius, double tau, double dt) {
        const VoExit e = compute_vo_exit(vec(rel_position), vec(rel_velocity), combined_radius, tau, dt);
        py::dict d;
        d["u"] = pair(e.u);
        d["normal"] = pair(e.normal);
        d["region"] = region_name(e.region);
        return d;
      },
      py::arg("rel_position"), py::arg("rel_velocity"), py::arg("combined_radius"), py::arg("tau"),
      py::arg("dt"));

  m.def(
      "make_crossing",
      [](const std::string& kind, std::size_t agents_per_arm, double vehicle_fraction, std::uint64_t seed) {
        CrossingKind k;
        if (kind == "two_way") {
          k = CrossingKind::TwoWay;
        } else if (kind == "four_way") {
          k = CrossingKind::FourWay;
        } else {
          throw ValidationError("kind", "expected two_way or four_way");
        }
        return scenario_to_json(make_crossing(k, agents_per_arm, vehicle_fraction, seed));
      },
      py::arg("kind"), py::arg("agents_per_arm"), py::arg("vehicle_fraction") = 0.0, py::arg("seed") = 0,
      "Scenario JSON for a two- or four-way crossing.");

  m.def(
      "run_scenario",
      [](const std::string& scenario_json, std::size_t workers, std::size_t frame_budget, bool trajectory) {
        const ScenarioConfig config = parse_scenario(scenario_json);
        RunOptions o;
        o.workers = workers;
        o.frame_budget = frame_budget;
        o.record_trajectories = trajectory;
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run(config, o);
        }
        const RunSummary& s = r.summary;
        py::dict d;
        d["agents"] = s.agents;
        d["seed"] = s.seed;
        d["frames"] = s.frames;
        d["terminated"] = s.terminated;
        d["total_collisions"] = s.total_collisions;
        d["min_separation"] = s.min_separation;
        d["mean_frame_ms"] = s.mean_frame_ms;
        d["fallback_solves"] = s.fallback_solves;
        d["remaining_agents"] = s.remaining_agents;
        py::dict travel;
        for (AgentClass c : {AgentClass::Pedestrian, AgentClass::Vehicle}) {
          const double t = s.mean_travel_time[class_index(c)];
          travel[py::str(std::string(to_string(c)))] = std::isnan(t) ? py::none() : py::cast(t);
        }
        d["mean_travel_time"] = travel;
        if (trajectory) d["trajectory_csv"] = format_trajectories(r.trajectory);
        return d;
      },
      py::arg("scenario_json"), py::arg("workers") = 1, py::arg("frame_budget") = 0, py::arg("trajectory") = false,
      "Runs a scenario given as JSON text and returns its summary.");
}
