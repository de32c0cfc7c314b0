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

// Command-line driver: run a scenario file, run a generated crossing, or
// benchmark frame time across agent and worker counts.

#include <iostream>
#include <map>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "orcasim/cli.hpp"

namespace {

void add_common(CLI::App* cmd, orcasim::cli::Overrides& o, std::string& out) {
  cmd->add_option("--out", out, "Output directory")->required();
  cmd->add_option("--seed", o.seed, "Override the scenario seed");
  cmd->add_option("--dt", o.dt, "Override the time step (s)")->check(CLI::PositiveNumber);
  cmd->add_option("--tau", o.tau, "Override the lookahead time (s)")->check(CLI::PositiveNumber);
  cmd->add_option("--frames", o.frames, "Override max_frames");
  cmd->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = orcasim::cli;
  CLI::App app{"orcasim: headless ORCA crowd and vehicle simulator"};
  app.require_subcommand(1);

  cli::Overrides run_overrides;
  std::string scenario_path;
  std::string run_out;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario file");
  run_cmd->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  add_common(run_cmd, run_overrides, run_out);

  cli::Overrides crossing_overrides;
  std::string crossing_out;
  std::string kind = "two_way";
  std::size_t per_arm = 100;
  double vehicle_fraction = 0.0;
  auto* crossing_cmd = app.add_subcommand("crossing", "Generate and run a two- or four-way crossing");
  crossing_cmd->add_option("--kind", kind, "two_way or four_way")->check(CLI::IsMember({"two_way", "four_way"}));
  crossing_cmd->add_option("--agents", per_arm, "Agents per arm");
  crossing_cmd->add_option("--vehicle-fraction", vehicle_fraction, "Share of vehicles per arm")
      ->check(CLI::Range(0.0, 1.0));
  add_common(crossing_cmd, crossing_overrides, crossing_out);

  cli::BenchOptions bench;
  bench.agent_counts = {1000, 2000, 4000};
  bench.worker_counts = {1, std::max(1U, std::thread::hardware_concurrency())};
  std::string bench_out = "bench.csv";
  auto* bench_cmd = app.add_subcommand("bench", "Benchmark frame time of a four-way crossing");
  bench_cmd->add_option("--agents", bench.agent_counts, "Total agent counts")->delimiter(',');
  bench_cmd->add_option("--workers", bench.worker_counts, "Worker counts")->delimiter(',');
  bench_cmd->add_option("--reps", bench.repetitions, "Repetitions per configuration");
  bench_cmd->add_option("--frames", bench.frames, "Frame budget per run");
  bench_cmd->add_option("--vehicle-fraction", bench.vehicle_fraction, "Share of vehicles")->check(CLI::Range(0.0, 1.0));
  bench_cmd->add_option("--seed", bench.seed, "Scenario seed");
  bench_cmd->add_option("--out", bench_out, "Report CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kValidation;
  }

  if (*run_cmd) return cli::cmd_run(scenario_path, run_out, run_overrides, std::cout, std::cerr);
  if (*crossing_cmd) {
    const auto k = kind == "four_way" ? orcasim::CrossingKind::FourWay : orcasim::CrossingKind::TwoWay;
    return cli::cmd_crossing(k, per_arm, vehicle_fraction, crossing_out, crossing_overrides, std::cout, std::cerr);
  }
  return cli::cmd_bench(bench, bench_out, std::cout, std::cerr);
}
