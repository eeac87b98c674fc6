/*
 * Copyright 2026 The GRAF Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace graf::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 2,
  kDataError = 3,
  kInternal = 4,
};

// Runs one command line (without the program name). Human-readable output
// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

// Comma-separated list, "a..b:s" (inclusive, step s) or "a..b". A bare
// range uses step 1 when `range_points` is 0, otherwise `range_points`
// evenly spaced values from a to b.
std::vector<std::size_t> parse_size_list(const std::string& text,
                                         std::size_t range_points = 0);

}  // namespace graf::cli
