// include/drivestate/parallel.h

// Copyright 2026 The drivestate Authors.
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

#ifndef DRIVESTATE_PARALLEL_H_
#define DRIVESTATE_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace drivestate {

// Number of hardware threads, at least 1.
int DefaultWorkers();

// Calls fn(i) for i in [0, n) on up to 'workers' threads. Tasks are claimed
// from a shared counter; if any throw, the exception of the lowest index is
// rethrown after all workers finish.
void ParallelFor(size_t n, int workers, const std::function<void(size_t)> &fn);

}  // namespace drivestate

#endif  // DRIVESTATE_PARALLEL_H_
