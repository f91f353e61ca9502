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

#include <string>
#include <vector>

// Acceptance criteria 1-10 as runnable checks. Each returns its measured
// numbers next to the bound it is held to.

namespace sta::acceptance {

inline constexpr int kCriteria = 10;

struct Metric {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  std::string relation;  // "<", "<=", ">", ">=" or "info" (recorded, not asserted)
  bool pass = true;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Metric> metrics;
  std::string note;
  double seconds = 0.0;
  bool pass = false;
};

/// Runs criterion `id` (1..10). Module errors are caught and reported as a failure with the message in
/// `note`. Throws std::out_of_range for an unknown id.
CriterionResult run_criterion(int id);

std::vector<CriterionResult> run_all();

/// "PASS  3  title" style line.
std::string summary_line(const CriterionResult& r);
/// JSON object {id, title, pass, seconds, note, metrics[...]}.
std::string result_json(const CriterionResult& r);

}  // namespace sta::acceptance
