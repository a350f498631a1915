// Copyright 2026 The rgb2raw Authors
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

#include <ostream>
#include <string>
#include <vector>

namespace rgb2raw::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;    // unexpected internal error
inline constexpr int kExitUsage = 2;      // bad flags
inline constexpr int kExitInput = 3;      // missing/unreadable/malformed inputs
inline constexpr int kExitInvariant = 4;  // config or invariant violation
inline constexpr int kExitNumerical = 5;  // training diverged

/// Worker count for parallel stages, from RGB2RAW_WORKERS (default 1).
int worker_count();

/// Entry point shared by the executable and the tests. `args` excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rgb2raw::cli
