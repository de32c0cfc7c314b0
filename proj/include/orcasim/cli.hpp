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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "orcasim/engine.hpp"
#include "orcasim/scenario.hpp"

namespace orcasim::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kValidation = 2,
  kNonTermination = 3,
  kIo = 4,
};

inline constexpr const char* kTrajectoryFile = "trajectories.csv";
inline constexpr const char* kMetricsFile = "metrics.csv";
inline constexpr const char* kScenarioFile = "scenario.json";

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> tau;
  std::optional<std::size_t> frames;  // replaces max_frames
  std::size_t workers = 1;
};

/// Applies overrides and revalidates. Throws ValidationError.
void apply_overrides(ScenarioConfig& config, const Overrides& overrides);

/// One-row summary table written next to the trajectory file.
std::string format_metrics_summary(const RunSummary& summary);

int cmd_run(const std::filesystem::path& scenario_path, const std::filesystem::path& out_dir,
            const Overrides& overrides, std::ostream& log, std::ostream& err);

int cmd_crossing(CrossingKind kind, std::size_t agents_per_arm, double vehicle_fraction,
                 const std::filesystem::path& out_dir, const Overrides& overrides, std::ostream& log,
                 std::ostream& err);

struct BenchRow {
  std::size_t agent_count = 0;
  std::size_t worker_count = 0;
  double mean_ms = 0.0;
  double p95_ms = 0.0;
  std::size_t frames = 0;
  std::size_t collisions = 0;
};

struct BenchReport {
  std::string machine;
  std::vector<BenchRow> rows;  // sorted by (agent_count, worker_count)
};

struct BenchOptions {
  std::vector<std::size_t> agent_counts;
  std::vector<std::size_t> worker_counts;
  std::size_t repetitions = 1;
  std::size_t frames = 500;
  double vehicle_fraction = 0.0;
  std::uint64_t seed = 1;
};

/// Times a standard four-way crossing (agent_count / 4 per arm) for a fixed
/// frame budget per (count, workers) pair. Nothing is written while timing.
/// Throws ValidationError on empty lists or zero counts, and SimulationError
/// if non-timing fields differ between repetitions.
BenchReport run_bench(const BenchOptions& options);
std::string format_bench_report(const BenchReport& report);
std::string machine_descriptor();

int cmd_bench(const BenchOptions& options, const std::filesystem::path& out_path, std::ostream& log,
              std::ostream& err);

}  // namespace orcasim::cli
