// Copyright 2026 The CURI Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CURI_PARALLEL_H_
#define CURI_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace curi {

// Worker count: CURI_THREADS if set and positive, else the hardware
// concurrency (at least 1).
int DefaultThreadCount();

// Calls fn(i) for every i in [0, n) using up to `threads` workers (0 means
// DefaultThreadCount()). Items are claimed dynamically; callers write the
// result for item i into slot i so output never depends on scheduling. The
// first exception thrown by any worker is rethrown.
void ParallelFor(std::size_t n, int threads,
                 const std::function<void(std::size_t)>& fn);

}  // namespace curi

#endif  // CURI_PARALLEL_H_
