// Copyright 2026 The STA Lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sta/classical.hpp"
#include "sta/meanfield.hpp"
#include "sta/quantum.hpp"
#include "sta/schedules.hpp"

// Output artifacts. Column orders are fixed and listed in docs/formats.md.
// Numbers are printed with %.17g so a CSV round-trips every double and two runs
// of the same config give byte-identical files.

namespace sta::io {

std::string format_number(double v);

/// Header line plus one line per row, '\n' terminated. Throws std::invalid_argument on a ragged row.
std::string to_csv(std::span<const std::string> header, const std::vector<std::vector<double>>& rows);

/// t,gamma,dgamma,ddgamma,f,df,ddf,tau,chi,omega_sq_cd on `samples` uniform times. chi is 0 when f_F = 0;
/// omega_sq_cd = omega0^2/gamma^4 - gammaddot/gamma.
std::string schedule_csv(const DriveSchedule& s, std::size_t samples, double omega0 = 1.0);
/// t,q,p,H,omega,I
std::string trajectory_csv(const Trajectory& tr);
/// t,F_vs_Utarget,F_vs_target,norm,energy
std::string invariant_csv(std::span<const InvariantSample> samples);
/// t,R,F,norm,g
std::string meanfield_csv(std::span<const MeanFieldSample> samples);
/// t,event,q,p_before,p_after
std::string box_events_csv(std::span<const BoxEvent> events);

/// Writes `content` to `path`, creating parent directories. Throws std::runtime_error on failure.
void write_file(const std::filesystem::path& path, std::string_view content);

// -- SVG ------------------------------------------------------------------------------

struct Series {
  std::string label;
  std::vector<double> x, y;
  std::string color = "#1f77b4";
  bool scatter = false;
  bool dotted = false;
};

struct Plot {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<Series> series;
  double width = 640.0;
  double height = 420.0;
};

/// Line and scatter plot with linear axes fitted to the data.
std::string svg_plot(const Plot& plot);

/// Density snapshots stacked bottom to top with a vertical offset per snapshot.
std::string svg_waterfall(const SpatialGrid& grid, std::span<const DensitySnapshot> snapshots,
                          std::string_view title);

}  // namespace sta::io
