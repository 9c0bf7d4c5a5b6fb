#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace umbra {

/// 0 means use hardware concurrency. Set from UMBRA_THREADS by the CLI.
void set_thread_cap(unsigned n);
unsigned thread_cap();

/// Runs fn(chunkIndex, begin, end) over [0, n) split into a fixed number of
/// chunks that does not depend on the thread count, so per-chunk results can
/// be merged in chunk order and the outcome is identical no matter how many
/// workers ran.
void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

}  // namespace umbra
