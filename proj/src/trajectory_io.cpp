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

#include "orcasim/trajectory_io.hpp"

#include <bit>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>
#include <system_error>

#include "orcasim/errors.hpp"

namespace orcasim {
namespace {

constexpr std::string_view kMagic = "# orcasim trajectory v1";
constexpr std::string_view kGoalPrefix = "# goal,";
constexpr std::string_view kHeader = "frame,time,agent_id,class,x,y,vx,vy,radius";

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(delim, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

template <typename T>
T parse_field(std::string_view text, std::size_t line_no, const char* field) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError("line " + std::to_string(line_no), std::string("bad ") + field + " '" + std::string(text) + "'");
  }
  return value;
}

void append_double(std::string& out, double v) { out += format_double(v); }

}  // namespace

std::string format_double(double v) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
  return std::string(buffer, ptr);
}

std::string format_trajectories(const TrajectoryLog& log) {
  std::string out;
  out.reserve(64 + log.goals.size() * 48 + log.frames.size() * 16);
  out += kMagic;
  out += '\n';
  for (const auto& g : log.goals) {
    out += kGoalPrefix;
    out += std::to_string(g.id);
    out += ',';
    append_double(out, g.goal.x);
    out += ',';
    append_double(out, g.goal.y);
    out += '\n';
  }
  out += kHeader;
  out += '\n';
  for (const auto& frame : log.frames) {
    const std::string prefix = std::to_string(frame.frame) + "," + format_double(frame.time) + ",";
    for (const auto& a : frame.agents) {
      out += prefix;
      out += std::to_string(a.id);
      out += ',';
      out += to_string(a.agent_class);
      for (double v : {a.position.x, a.position.y, a.velocity.x, a.velocity.y, a.radius}) {
        out += ',';
        append_double(out, v);
      }
      out += '\n';
    }
  }
  return out;
}

TrajectoryLog parse_trajectories(const std::string& text) {
  TrajectoryLog log;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string_view view(line);
    const std::string where = "line " + std::to_string(line_no);

    if (!header_seen) {
      if (view.starts_with(kGoalPrefix)) {
        const auto fields = split(view.substr(kGoalPrefix.size()), ',');
        if (fields.size() != 3) throw ValidationError(where, "goal line needs id,x,y");
        log.goals.push_back({parse_field<AgentId>(fields[0], line_no, "agent_id"),
                             {parse_field<double>(fields[1], line_no, "x"), parse_field<double>(fields[2], line_no, "y")}});
      } else if (view.starts_with("#")) {
        continue;
      } else if (view == kHeader) {
        header_seen = true;
      } else {
        throw ValidationError(where, "expected header row '" + std::string(kHeader) + "'");
      }
      continue;
    }
    if (view.empty()) continue;

    const auto fields = split(view, ',');
    if (fields.size() != 9) throw ValidationError(where, "expected 9 fields, got " + std::to_string(fields.size()));
    const auto frame = parse_field<std::uint64_t>(fields[0], line_no, "frame");
    const auto time = parse_field<double>(fields[1], line_no, "time");
    AgentRecord rec;
    rec.id = parse_field<AgentId>(fields[2], line_no, "agent_id");
    const auto cls = parse_agent_class(fields[3]);
    if (!cls) throw ValidationError(where, "unknown class '" + std::string(fields[3]) + "'");
    rec.agent_class = *cls;
    rec.position = {parse_field<double>(fields[4], line_no, "x"), parse_field<double>(fields[5], line_no, "y")};
    rec.velocity = {parse_field<double>(fields[6], line_no, "vx"), parse_field<double>(fields[7], line_no, "vy")};
    rec.radius = parse_field<double>(fields[8], line_no, "radius");

    if (log.frames.empty() || log.frames.back().frame != frame) {
      log.frames.push_back({frame, time, {}});
    } else if (std::bit_cast<std::uint64_t>(log.frames.back().time) != std::bit_cast<std::uint64_t>(time)) {
      throw ValidationError(where, "time differs from earlier rows of frame " + std::to_string(frame));
    }
    log.frames.back().agents.push_back(rec);
  }
  if (!header_seen) throw ValidationError("line " + std::to_string(line_no + 1), "missing header row");
  return log;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " into place at " + path.string());
  }
}

void write_trajectories(const TrajectoryLog& log, const std::filesystem::path& path) {
  write_file_atomic(path, format_trajectories(log));
}

TrajectoryLog read_trajectories(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_trajectories(buffer.str());
}

}  // namespace orcasim
