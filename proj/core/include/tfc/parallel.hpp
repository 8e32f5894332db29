// Distributed under the MIT License.
// See LICENSE for details.

#pragma once

#include <functional>

#include <Eigen/Core>

namespace tfc {

/// Worker count from the TFC_THREADS environment variable, defaulting to
/// the hardware concurrency. Always at least 1.
int thread_count();

/// Runs fn(begin, end) over contiguous row blocks of [0, n). Blocks are
/// independent, so results do not depend on the worker count. Nested calls
/// run serially. The first exception thrown by any block is rethrown.
void parallel_rows(Eigen::Index n,
                   const std::function<void(Eigen::Index, Eigen::Index)>& fn,
                   Eigen::Index min_block = 64);

}  // namespace tfc
