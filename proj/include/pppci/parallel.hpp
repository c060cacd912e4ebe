#ifndef PPPCI_PARALLEL_HPP
#define PPPCI_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace pppci {

// Hardware concurrency capped by PPP_THREADS when set (>= 1).
unsigned worker_count();

// Calls fn(i) for i in [0, n), spread over worker_count() threads. Results must
// be written to per-index slots for order independence. The first exception
// thrown by any worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace pppci

#endif
