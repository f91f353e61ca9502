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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "sta/io.hpp"

using namespace sta;

namespace {

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Io, NumbersRoundTrip) {
  for (double v : {0.1, -1.0 / 3.0, 6.02214076e23, 5e-324, 1.0}) EXPECT_EQ(std::strtod(io::format_number(v).c_str(), nullptr), v);
  EXPECT_EQ(io::format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(io::format_number(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Io, CsvShape) {
  const std::vector<std::string> h{"a", "b"};
  EXPECT_EQ(io::to_csv(h, {{1.0, 2.5}, {-3.0, 0.0}}), "a,b\n1,2.5\n-3,0\n");
  EXPECT_THROW(io::to_csv(h, {{1.0}}), std::invalid_argument);
}

TEST(Io, ScheduleCsvColumns) {
  const auto s = make_quintic_schedule(2.0, 1.0, 1.0);
  const auto csv = io::schedule_csv(s, 11);
  EXPECT_EQ(first_line(csv), "t,gamma,dgamma,ddgamma,f,df,ddf,tau,chi,omega_sq_cd");
  EXPECT_EQ(lines(csv), 12u);
  // last row: t = 1, gamma = 2, omega_sq_cd = 1/16
  const auto last = csv.substr(csv.rfind('\n', csv.size() - 2) + 1);
  std::stringstream ss(last);
  std::vector<double> v;
  for (std::string cell; std::getline(ss, cell, ',');) v.push_back(std::stod(cell));
  ASSERT_EQ(v.size(), 10u);
  EXPECT_EQ(v[0], 1.0);
  EXPECT_NEAR(v[1], 2.0, 1e-14);
  EXPECT_NEAR(v[9], 1.0 / 16.0, 1e-12);
  // no transport: chi column is zero
  EXPECT_NE(io::schedule_csv(make_quintic_schedule(2.0, 0.0, 1.0), 3).find(",0,0.0625\n"), std::string::npos);
}

TEST(Io, FixedHeaders) {
  EXPECT_EQ(first_line(io::trajectory_csv(Trajectory{})), "t,q,p,H,omega,I");
  EXPECT_EQ(first_line(io::invariant_csv({})), "t,F_vs_Utarget,F_vs_target,norm,energy");
  EXPECT_EQ(first_line(io::meanfield_csv({})), "t,R,F,norm,g");
  EXPECT_EQ(first_line(io::box_events_csv({})), "t,event,q,p_before,p_after");
  const std::vector<MeanFieldSample> smp{{0.5, 1e-9, 1.0, 1.0, 3.0, 2.0}};
  EXPECT_EQ(io::meanfield_csv(smp), "t,R,F,norm,g\n0.5,1.0000000000000001e-09,1,1,3\n");
}

TEST(Io, WriteFileCreatesDirectories) {
  const auto dir = std::filesystem::temp_directory_path() / "sta_io_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  io::write_file(dir / "x.csv", "a\n1\n");
  std::ifstream in(dir / "x.csv");
  std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(s, "a\n1\n");
  std::filesystem::remove_all(dir.parent_path());
}

TEST(Io, SvgPlot) {
  io::Plot p;
  p.title = "a < b";
  io::Series line{"line", {0.0, 1.0, 2.0}, {0.0, 1.0, 4.0}};
  io::Series dots{"dots", {0.5, 1.5}, {2.0, 3.0}, "#d62728", true};
  io::Series gap{"", {0.0, std::nan(""), 2.0}, {1.0, 1.0, 1.0}, "#000000", false, true};
  p.series = {line, dots, gap};
  const auto svg = io::svg_plot(p);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("a &lt; b"), std::string::npos);
  EXPECT_EQ(std::count(svg.begin(), svg.end(), '\n') > 5, true);
  std::size_t circles = 0;
  for (std::size_t pos = 0; (pos = svg.find("<circle", pos)) != std::string::npos; ++pos) ++circles;
  EXPECT_EQ(circles, 2u);
  EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
  // the NaN splits the dotted path into two moves
  const auto last_path = svg.rfind("<path d=\"");
  const auto d = svg.substr(last_path, svg.find('"', last_path + 9) - last_path);
  EXPECT_EQ(std::count(d.begin(), d.end(), 'M'), 2);
  // deterministic
  EXPECT_EQ(svg, io::svg_plot(p));
}

TEST(Io, SvgWaterfall) {
  const SpatialGrid g(256, -1.0, 1.0);
  std::vector<DensitySnapshot> snaps{{0.0, std::vector<double>(256, 1.0)}, {1.0, std::vector<double>(256, 0.5)}};
  const auto svg = io::svg_waterfall(g, snaps, "rho");
  EXPECT_NE(svg.find("t = 1"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}
