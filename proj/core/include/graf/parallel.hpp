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

#include <cstddef>
#include <functional>

namespace graf {

// Thread count used when the caller passes 0: GRAF_THREADS if set and
// positive, otherwise std::thread::hardware_concurrency().
unsigned default_thread_count();

// Runs body(i) for i in [0, n) on up to `threads` workers. Results must be
// written to per-index slots; the schedule is not deterministic but the
// outcome is as long as body(i) only depends on i. The first exception
// thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace graf
