#pragma once

#include <cstdint>
#include <functional>

namespace crq {

/// Worker count: CRQOPT_THREADS when set and positive, else the hardware concurrency.
int thread_count();

/// Runs body(lo, hi) over a partition of [begin, end) on up to thread_count() threads.
void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t, std::int64_t)>& body);

}  // namespace crq
