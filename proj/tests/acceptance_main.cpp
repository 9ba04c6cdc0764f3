// Copyright 2026 The gkpcav Authors.
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

// Acceptance binary: one PASS/FAIL line per criterion, exit status 0 only
// when every criterion passes.
//
//   gkpcav_acceptance [--json FILE] [--budget N] [id ...]

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "gkpcav/verify/acceptance.hpp"

int main(int argc, char** argv) {
  gkpcav::verify::AcceptanceOptions opt;
  std::string json_path;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--json" && i + 1 < argc) {
      json_path = argv[++i];
    } else if (arg == "--budget" && i + 1 < argc) {
      opt.budget = std::atoi(argv[++i]);
    } else {
      opt.only.push_back(std::atoi(arg.c_str()));
    }
  }
  opt.on_result = [](const gkpcav::verify::CriterionResult& r) {
    std::cout << gkpcav::verify::format_line(r) << std::endl;
  };
  const auto results = gkpcav::verify::run_acceptance(opt);
  std::size_t passed = 0;
  for (const auto& r : results) passed += r.passed ? 1 : 0;
  std::cout << passed << "/" << results.size() << " criteria passed" << std::endl;
  if (!json_path.empty()) {
    std::ofstream(json_path) << gkpcav::verify::to_json(results).dump(2) << "\n";
  }
  return passed == results.size() && !results.empty() ? EXIT_SUCCESS : EXIT_FAILURE;
}
