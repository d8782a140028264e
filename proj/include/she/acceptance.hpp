/*
   Copyright 2026 The she-lattice Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace she {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;  // measured values against their tolerances
    double seconds = 0.0;
};

struct AcceptanceOptions {
    unsigned threads = 0;
    std::vector<int> only;  // empty: all criteria
    std::uint64_t seed = 20261019;
    std::filesystem::path scratch;  // determinism outputs; empty: temp directory
    std::function<void(const CriterionResult&)> on_result;
};

inline constexpr int acceptance_criteria = 13;

/// Runs the acceptance criteria at their stated sizes and tolerances.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

/// "[PASS] 7  l1 martingale ... (12.3 s)"
std::string format_result(const CriterionResult& r);

} // namespace she
