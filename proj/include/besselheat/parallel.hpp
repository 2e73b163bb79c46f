#pragma once

#include <cstddef>
#include <functional>
#include <optional>

namespace besselheat {

/// Worker count: the explicit request if given, else BESSEL_HEAT_THREADS,
/// else the hardware concurrency (at least 1).  Throws ConfigError on a
/// malformed or non-positive environment value.
unsigned resolve_threads(std::optional<unsigned> requested = std::nullopt);

/// Calls body(i) for every i in [0, count) on up to `threads` workers.
/// Items are handed out dynamically, so body must only write to slot i of
/// preallocated output; the first exception is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace besselheat
