#pragma once

#include <cstddef>
#include <functional>

namespace semiwig {

/// Worker count used when a call does not pass one. Starts at 1.
void set_default_threads(std::size_t n);
std::size_t default_threads() noexcept;

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = default_threads()).
/// Indices are handed out in a fixed round-robin pattern, so results written by index are
/// identical for any worker count. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, std::size_t threads = 0);

}  // namespace semiwig
