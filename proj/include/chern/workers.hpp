#pragma once

// Size of the worker pool used by grid reductions and scans. Zero selects the
// CHERN_WORKERS environment variable, falling back to hardware parallelism.

namespace chern {

void set_worker_count(int workers);
int worker_count();

}  // namespace chern
