#pragma once

#include <functional>

#include "germrec/grid.hpp"

namespace germrec {

// Runs fn(i) for i in [begin, end) on up to `jobs` threads. Callers write disjoint outputs.
// The exception of the lowest failing index is rethrown.
void parallel_for(Index begin, Index end, int jobs, const std::function<void(Index)>& fn);

}  // namespace germrec
