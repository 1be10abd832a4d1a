#pragma once

#include <functional>

namespace aniso {

/// Worker count: ANISO_THREADS caps it, hardware concurrency bounds it,
/// minimum 1.
int worker_count();

/// Runs body(i) for i in [0, n) across workers. Callers write results
/// into preallocated slots indexed by i, so the outcome does not depend
/// on the worker count.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace aniso
