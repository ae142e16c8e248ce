#pragma once

#include <functional>

namespace gscat {

/// Worker cap from GSCAT_THREADS (0 or unset = hardware concurrency).
int worker_count();

/// Calls body(i) for every i in [0, count) on up to worker_count() threads.
/// Work items must write disjoint outputs. If any item throws, the exception
/// from the lowest failing index is rethrown after all workers finish.
void parallel_for(int count, const std::function<void(int)>& body);

}  // namespace gscat
