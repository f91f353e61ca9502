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

// Runs every acceptance criterion (or the ids given as arguments) and prints one
// PASS/FAIL line each. Exit status 1 when any criterion fails.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "sta/acceptance.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty())
    for (int id = 1; id <= sta::acceptance::kCriteria; ++id) ids.push_back(id);
  int failed = 0;
  for (int id : ids) {
    const auto r = sta::acceptance::run_criterion(id);
    std::printf("%s\n", sta::acceptance::summary_line(r).c_str());
    std::fflush(stdout);
    failed += !r.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(ids.size()) - failed, ids.size());
  return failed == 0 ? 0 : 1;
}
