// Copyright 2026 The cmrf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CMRF_ACCEPTANCE_HPP
#define CMRF_ACCEPTANCE_HPP

#include <cstdint>
#include <string>

#include "cmrf/harness.hpp"

namespace cmrf {

inline constexpr int kAcceptanceCriteria = 12;

struct AcceptanceOptions {
  std::uint64_t seed = 20260101;
  unsigned workers = 0;
};

/// Short description of criterion `id` (1..12).
std::string criterion_title(int id);

/// Runs one acceptance criterion. Every tolerance is fixed here; the report
/// carries one check per asserted bound, including the runtime limit.
RunReport run_criterion(int id, const AcceptanceOptions& opts = {});

/// "AC<id> PASS|FAIL <title>: <first failing check or check count>"
std::string criterion_summary(int id, const RunReport& r);

}  // namespace cmrf

#endif  // CMRF_ACCEPTANCE_HPP
