//
// gcnx - Copyright 2026 The gcnx Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef GCNX_PARALLEL_H_
#define GCNX_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace gcnx {

// Worker cap: GCNX_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
int worker_count();

// Calls fn(i) for i in [0, n) across worker_count() threads. Callers write
// results into slot i, which keeps output order independent of scheduling.
// The first exception thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &fn);

}  // namespace gcnx

#endif  // GCNX_PARALLEL_H_
