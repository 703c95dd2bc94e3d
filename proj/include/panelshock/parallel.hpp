#ifndef PANELSHOCK_PARALLEL_HPP
#define PANELSHOCK_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace panelshock {

// PANELSHOCK_THREADS caps the worker count; an explicit request below the
// cap wins, no request means use the cap, and with neither the default is
// single-threaded.
int resolve_thread_count(int requested);

// Runs fn(i) for i in [0, n). Work is partitioned by index only, so results
// must be written to per-index slots; output is then identical for any
// worker count.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace panelshock

#endif
