#pragma once

#include <cstddef>
#include <functional>

namespace wasabi {

/// Caps the number of worker threads used by parallel sections. 0 restores
/// the default (hardware concurrency).
void set_thread_count(std::size_t threads);
std::size_t thread_count();

/// Runs body(i) for i in [0, count). Each index is executed exactly once;
/// callers write results into per-index slots so the outcome does not depend
/// on the schedule. Nested calls from inside a worker run serially.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace wasabi
