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
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sta/potentials.hpp"
#include "sta/schedules.hpp"

namespace sta::cli {

/// Bad flags, config files or values. Maps to exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitPass = 0;
inline constexpr int kExitAssertion = 1;
inline constexpr int kExitUsage = 2;

/// "name" or "name:key=value,key=value", e.g. "quartic:alpha2=0.5,alpha4=0.05". Series coefficients are
/// given as "series:alpha=0;0;0.5". Throws UsageError.
PotentialSpec parse_potential(std::string_view text, double mass = 1.0);

/// cubic | quintic | constant. Throws UsageError.
DriveSchedule parse_schedule(std::string_view kind, double gamma_final, double f_final, double tau_final);

struct ConfigEntry {
  std::string key;  // dashes, as on the command line
  nlohmann::json value;
  std::string where;  // "file:line" or "file"
};

/// Flattened leaf keys of a TOML (.toml) or JSON (.json, or anything starting with '{') file.
/// Nested tables are flattened to their leaf keys and underscores become dashes. Throws UsageError
/// with a file:line:column diagnostic on a syntax error or a repeated key.
std::vector<ConfigEntry> load_config(const std::filesystem::path& path);

/// Full command-line entry point. Returns the process exit status.
int run(int argc, char** argv);

}  // namespace sta::cli
