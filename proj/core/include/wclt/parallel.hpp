#pragma once

#include <cstddef>
#include <functional>

namespace wclt {

/// Number of workers to use when the caller passes 0.
unsigned default_threads();

/// Runs body(i) for i in [0, count) on up to `threads` workers. Work is handed
/// out by an atomic counter; callers write results into slot i so the final
/// reduction can run in index order.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace wclt
