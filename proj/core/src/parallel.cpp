// Distributed under the MIT License.
// See LICENSE for details.

#include "tfc/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace tfc {

namespace {

thread_local bool in_parallel = false;

}  // namespace

int thread_count() {
  if (const char* env = std::getenv("TFC_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 16u));
}

void parallel_rows(Eigen::Index n,
                   const std::function<void(Eigen::Index, Eigen::Index)>& fn,
                   Eigen::Index min_block) {
  if (n <= 0) return;
  const Eigen::Index workers = std::min<Eigen::Index>(
      thread_count(), std::max<Eigen::Index>(1, n / std::max<Eigen::Index>(1, min_block)));
  if (in_parallel || workers <= 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> threads;
  std::exception_ptr error;
  std::mutex mutex;
  const Eigen::Index chunk = (n + workers - 1) / workers;
  for (Eigen::Index w = 0; w < workers; ++w) {
    const Eigen::Index begin = w * chunk;
    const Eigen::Index end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&, begin, end] {
      in_parallel = true;
      try {
        fn(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mutex);
        if (!error) error = std::current_exception();
      }
      in_parallel = false;
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace tfc
