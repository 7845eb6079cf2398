#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace skinlink {

// SKINLINK_THREADS caps the count; defaults to hardware concurrency
std::size_t worker_count();

// Runs body(i) for i in [0, n). Work is statically chunked; any exception is
// rethrown after all workers join (lowest index wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace skinlink
