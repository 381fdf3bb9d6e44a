// Copyright 2026 The OnlineIRL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Trajectory CSV ingest/export and atomic file writes.

#ifndef OIRL_IO_HPP_
#define OIRL_IO_HPP_

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "oirl/dynamics.hpp"
#include "oirl/errors.hpp"

namespace oirl {

// Shortest decimal text that round-trips the double exactly.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Writes to "<path>.tmp" and renames over path.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out << contents;
    out.flush();
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
  }
}

inline std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  const int nx = traj.state_dim();
  const int nu = traj.control_dim();
  out << "t";
  for (int i = 1; i <= nx; ++i) out << ",x" << i;
  for (int i = 1; i <= nu; ++i) out << ",u" << i;
  out << '\n';
  for (const auto& s : traj) {
    out << format_double(s.t);
    for (int i = 0; i < nx; ++i) out << ',' << format_double(s.x(i));
    for (int i = 0; i < nu; ++i) out << ',' << format_double(s.u(i));
    out << '\n';
  }
  return out.str();
}

inline void write_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
  write_file_atomic(path, trajectory_csv(traj));
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

// Parses "t,x1,...,x2n,u1,...,um" CSV text. Errors carry the 1-based line.
inline Trajectory parse_trajectory(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError("empty trajectory file", 1);
  ++lineno;
  const auto header = detail::split_csv(line);
  int nx = 0;
  int nu = 0;
  if (header.empty() || header[0] != "t") throw ParseError("header must start with 't'", lineno);
  for (std::size_t i = 1; i < header.size(); ++i) {
    const std::string& h = header[i];
    if (nu == 0 && h == "x" + std::to_string(nx + 1)) {
      ++nx;
    } else if (h == "u" + std::to_string(nu + 1)) {
      ++nu;
    } else {
      throw ParseError("unexpected header column '" + h + "'", lineno);
    }
  }
  if (nx < 2 || nx % 2 != 0) throw ParseError("state columns must be x1..x2n with n >= 1", lineno);
  if (nu < 1) throw ParseError("at least one control column u1 is required", lineno);

  std::vector<TrajectorySample> samples;
  std::vector<std::size_t> lines;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = detail::split_csv(line);
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(fields.size()),
                       lineno);
    }
    std::vector<double> vals(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const std::string& f = fields[i];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), vals[i]);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw ParseError("malformed number '" + f + "'", lineno);
      }
      if (!std::isfinite(vals[i])) throw ParseError("non-finite value '" + f + "'", lineno);
    }
    TrajectorySample s;
    s.t = vals[0];
    s.x = Eigen::Map<const Vec>(vals.data() + 1, nx);
    s.u = Eigen::Map<const Vec>(vals.data() + 1 + nx, nu);
    samples.push_back(std::move(s));
    lines.push_back(lineno);
  }
  if (samples.size() < 2) throw ParseError("a trajectory needs at least two samples", lineno);
  const double step = samples[1].t - samples[0].t;
  if (!(step > 0.0)) throw ParseError("sample times must be strictly increasing", lines[1]);
  Trajectory traj(step);
  traj.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    try {
      traj.push_back(std::move(samples[i]));
    } catch (const InvalidArgument&) {
      throw ParseError("non-uniform sample spacing", lines[i]);
    }
  }
  return traj;
}

inline Trajectory ingest_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trajectory file '" + path.string() + "'", 0);
  return parse_trajectory(in);
}

}  // namespace oirl

#endif  // OIRL_IO_HPP_
