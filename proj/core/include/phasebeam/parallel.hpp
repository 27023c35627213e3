#pragma once

#include <cstddef>
#include <functional>

namespace phasebeam {

/// Worker count for the parallel stages. 0 means "ask the environment":
/// PHASEBEAM_THREADS if set, otherwise std::thread::hardware_concurrency().
unsigned resolve_threads(unsigned requested);

/// Runs body(i) for i in [0, n) on up to `threads` workers. Each index must
/// write only its own outputs; results therefore do not depend on scheduling.
/// Every index runs; afterwards the exception from the lowest failing index
/// is rethrown, so error reporting is scheduling-independent too.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace phasebeam
