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

#include <filesystem>
#include <fstream>

#include "cli.hpp"

using namespace sta;
namespace fs = std::filesystem;

namespace {

fs::path write_tmp(const std::string& name, const std::string& text) {
  const auto dir = fs::temp_directory_path() / "sta_cli_test";
  fs::create_directories(dir);
  std::ofstream(dir / name) << text;
  return dir / name;
}

std::string usage_message(const std::function<void()>& f) {
  try {
    f();
  } catch (const cli::UsageError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(CliPotential, NamesAndParameters) {
  const auto q = cli::parse_potential("quartic:alpha2=0.25,alpha4=0.1");
  EXPECT_DOUBLE_EQ(eval_U0(q, 2.0), 0.25 * 4.0 + 0.1 * 16.0);
  EXPECT_DOUBLE_EQ(cli::parse_potential("harmonic", 2.0).mass, 2.0);
  EXPECT_DOUBLE_EQ(eval_U0(cli::parse_potential("series:alpha=0;0;0.5"), 3.0), 4.5);
  EXPECT_TRUE(is_box(cli::parse_potential("box:L=2")));
}

TEST(CliPotential, Rejections) {
  EXPECT_NE(usage_message([] { cli::parse_potential("nope"); }).find("unknown potential"), std::string::npos);
  EXPECT_NE(usage_message([] { cli::parse_potential("morse:Um=1,zeta=2"); }).find("zeta"), std::string::npos);
  EXPECT_NE(usage_message([] { cli::parse_potential("harmonic:omega0=abc"); }).find("abc"), std::string::npos);
  EXPECT_FALSE(usage_message([] { cli::parse_potential("power-law:b=2.5"); }).empty());
  EXPECT_FALSE(usage_message([] { cli::parse_potential("harmonic", -1.0); }).empty());
  EXPECT_FALSE(usage_message([] { cli::parse_schedule("sine", 2.0, 0.0, 1.0); }).empty());
  EXPECT_FALSE(usage_message([] { cli::parse_schedule("quintic", -2.0, 0.0, 1.0); }).empty());
}

TEST(CliConfig, TomlFlattensAndDashes) {
  const auto p = write_tmp("a.toml", "subcommand = \"quantum-run\"\n[drive]\ngamma_final = 1.5\nextent = [-8, 8]\n");
  const auto e = cli::load_config(p);
  ASSERT_EQ(e.size(), 3u);
  EXPECT_EQ(e[0].key, "subcommand");
  bool seen = false;
  for (const auto& x : e)
    if (x.key == "gamma-final") {
      seen = true;
      EXPECT_EQ(x.value.get<double>(), 1.5);
      EXPECT_NE(x.where.find(":3"), std::string::npos);
    }
  EXPECT_TRUE(seen);
}

TEST(CliConfig, JsonAndDiagnostics) {
  const auto ok = cli::load_config(write_tmp("b.json", "{\"dt\": 0.002, \"control\": false}"));
  ASSERT_EQ(ok.size(), 2u);
  EXPECT_EQ(ok[1].value, false);
  EXPECT_NE(usage_message([&] { cli::load_config(write_tmp("c.json", "{\n  \"dt\": ,\n}")); }).find("c.json:2:"),
            std::string::npos);
  EXPECT_NE(usage_message([&] { cli::load_config(write_tmp("d.toml", "a = 1\nb = = 2\n")); }).find("d.toml:2:"),
            std::string::npos);
  // the same leaf reached twice through different tables
  EXPECT_NE(usage_message([&] { cli::load_config(write_tmp("e.toml", "[x]\ndt = 1\n[y]\ndt = 2\n")); }).find("repeats"),
            std::string::npos);
  EXPECT_FALSE(usage_message([] { cli::load_config("/nonexistent/sta.toml"); }).empty());
}
