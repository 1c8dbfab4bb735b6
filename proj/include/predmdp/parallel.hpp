#pragma once

#include <cstddef>
#include <functional>

namespace predmdp {

/// Worker count used by parallel loops; 1 by default, overridable through
/// the PREDMDP_THREADS environment variable or set_thread_count().
int thread_count();
void set_thread_count(int n);

/// Runs fn(i) for i in [0, n). Work is chunked across threads; results must
/// be written to per-index slots so the outcome is identical for any
/// worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace predmdp
