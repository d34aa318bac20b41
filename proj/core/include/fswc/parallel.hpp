#pragma once

#include <cstddef>
#include <functional>

namespace fswc {

/// Process-wide worker-count for parallel_for. Default 1; the CLI sets it
/// from --threads. Results never depend on this value: work items are
/// independent and write to disjoint slots, reductions happen afterwards in
/// index order.
void set_worker_count(int n);
int worker_count();

/// Runs body(i) for i in [0, n). Each index is claimed atomically by one
/// worker; body must only write to state owned by index i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fswc
