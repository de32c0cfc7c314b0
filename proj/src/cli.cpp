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

#include "orcasim/cli.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <thread>

#include "orcasim/errors.hpp"
#include "orcasim/trajectory_io.hpp"

namespace orcasim::cli {
namespace {

std::string travel_field(double v) { return std::isnan(v) ? std::string() : format_double(v); }

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

int run_and_write(const ScenarioConfig& config, const std::filesystem::path& out_dir, std::size_t workers,
                  std::ostream& log, std::ostream& err) {
  for (const auto& w : config.warnings) err << "warning: " << w << "\n";
  RunOptions options;
  options.workers = workers;
  const RunResult result = run(config, options);

  ensure_dir(out_dir);
  write_trajectories(result.trajectory, out_dir / kTrajectoryFile);
  write_file_atomic(out_dir / kMetricsFile, format_metrics_summary(result.summary));

  const RunSummary& s = result.summary;
  log << "agents=" << s.agents << " frames=" << s.frames << " collisions=" << s.total_collisions
      << " min_separation=" << s.min_separation << " mean_frame_ms=" << s.mean_frame_ms
      << " fallback_solves=" << s.fallback_solves << "\n";
  if (!s.terminated) {
    err << "error: " << s.remaining_agents << " agents still active after " << s.frames << " frames (max_frames)\n";
    return kNonTermination;
  }
  return kOk;
}

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace

void apply_overrides(ScenarioConfig& config, const Overrides& overrides) {
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.dt) config.dt = *overrides.dt;
  if (overrides.tau) config.tau = *overrides.tau;
  if (overrides.frames) config.max_frames = *overrides.frames;
  if (overrides.workers == 0) throw ValidationError("workers", "must be at least 1");
  validate(config);
}

std::string format_metrics_summary(const RunSummary& s) {
  std::ostringstream out;
  out << "agents,seed,frames,terminated,total_collisions,min_separation,mean_frame_ms,p95_frame_ms,"
         "fallback_solves,mean_travel_time_pedestrian,mean_travel_time_vehicle\n";
  out << s.agents << ',' << s.seed << ',' << s.frames << ',' << (s.terminated ? 1 : 0) << ',' << s.total_collisions
      << ',' << format_double(s.min_separation) << ',' << format_double(s.mean_frame_ms) << ','
      << format_double(s.p95_frame_ms) << ',' << s.fallback_solves << ','
      << travel_field(s.mean_travel_time[class_index(AgentClass::Pedestrian)]) << ','
      << travel_field(s.mean_travel_time[class_index(AgentClass::Vehicle)]) << '\n';
  return out.str();
}

int cmd_run(const std::filesystem::path& scenario_path, const std::filesystem::path& out_dir,
            const Overrides& overrides, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    ScenarioConfig config = load_scenario(scenario_path);
    apply_overrides(config, overrides);
    return run_and_write(config, out_dir, overrides.workers, log, err);
  });
}

int cmd_crossing(CrossingKind kind, std::size_t agents_per_arm, double vehicle_fraction,
                 const std::filesystem::path& out_dir, const Overrides& overrides, std::ostream& log,
                 std::ostream& err) {
  return guarded(err, [&] {
    ScenarioConfig config = make_crossing(kind, agents_per_arm, vehicle_fraction, overrides.seed.value_or(0));
    apply_overrides(config, overrides);
    ensure_dir(out_dir);
    write_file_atomic(out_dir / kScenarioFile, scenario_to_json(config));
    return run_and_write(config, out_dir, overrides.workers, log, err);
  });
}

std::string machine_descriptor() {
  std::ostringstream out;
  out << "hardware_threads=" << std::thread::hardware_concurrency();
#if defined(__clang__)
  out << " compiler=clang-" << __clang_major__ << "." << __clang_minor__;
#elif defined(__GNUC__)
  out << " compiler=gcc-" << __GNUC__ << "." << __GNUC_MINOR__;
#endif
#if defined(NDEBUG)
  out << " build=release";
#else
  out << " build=debug";
#endif
  return out.str();
}

BenchReport run_bench(const BenchOptions& options) {
  if (options.agent_counts.empty()) throw ValidationError("agents", "list must not be empty");
  if (options.worker_counts.empty()) throw ValidationError("workers", "list must not be empty");
  if (options.repetitions == 0) throw ValidationError("reps", "must be at least 1");
  if (options.frames == 0) throw ValidationError("frames", "must be at least 1");

  std::vector<std::size_t> counts = options.agent_counts;
  std::vector<std::size_t> workers = options.worker_counts;
  std::sort(counts.begin(), counts.end());
  std::sort(workers.begin(), workers.end());
  for (std::size_t w : workers) {
    if (w == 0) throw ValidationError("workers", "must be at least 1");
  }

  BenchReport report;
  report.machine = machine_descriptor();
  for (std::size_t count : counts) {
    if (count < 4) throw ValidationError("agents", "need at least 4 agents for a four-way crossing");
    const ScenarioConfig config = make_crossing(CrossingKind::FourWay, count / 4, options.vehicle_fraction, options.seed);
    const std::vector<AgentState> initial = make_initial_agents(config);
    for (std::size_t w : workers) {
      RunOptions run_options;
      run_options.workers = w;
      run_options.record_trajectories = false;
      run_options.frame_budget = options.frames;

      std::vector<double> samples;
      BenchRow row;
      row.agent_count = initial.size();
      row.worker_count = w;
      for (std::size_t rep = 0; rep < options.repetitions; ++rep) {
        const RunResult result = run(config, initial, run_options);
        for (const auto& m : result.metrics) samples.push_back(m.wall_time_ms);
        if (rep == 0) {
          row.frames = result.summary.frames;
          row.collisions = result.summary.total_collisions;
        } else if (row.frames != result.summary.frames || row.collisions != result.summary.total_collisions) {
          throw SimulationError(result.summary.frames, std::nullopt, "non-timing bench fields differ between repetitions");
        }
      }
      double sum = 0.0;
      for (double s : samples) sum += s;
      row.mean_ms = samples.empty() ? 0.0 : sum / static_cast<double>(samples.size());
      row.p95_ms = percentile(samples, 0.95);
      report.rows.push_back(row);
    }
  }
  return report;
}

std::string format_bench_report(const BenchReport& report) {
  std::ostringstream out;
  out << "# machine: " << report.machine << "\n";
  out << "agent_count,worker_count,mean_ms,p95_ms,frames,collisions\n";
  for (const auto& r : report.rows) {
    out << r.agent_count << ',' << r.worker_count << ',' << format_double(r.mean_ms) << ','
        << format_double(r.p95_ms) << ',' << r.frames << ',' << r.collisions << '\n';
  }
  return out.str();
}

int cmd_bench(const BenchOptions& options, const std::filesystem::path& out_path, std::ostream& log,
              std::ostream& err) {
  return guarded(err, [&] {
    const BenchReport report = run_bench(options);
    const std::string table = format_bench_report(report);
    if (out_path.has_parent_path()) ensure_dir(out_path.parent_path());
    write_file_atomic(out_path, table);
    log << table;
    return kOk;
  });
}

}  // namespace orcasim::cli
