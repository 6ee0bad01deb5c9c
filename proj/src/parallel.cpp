#include "germrec/parallel.hpp"

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace germrec {

void parallel_for(Index begin, Index end, int jobs, const std::function<void(Index)>& fn) {
  const Index n = end - begin;
  if (n <= 0) return;
  if (jobs <= 1 || n == 1) {
    for (Index i = begin; i < end; ++i) fn(i);
    return;
  }
  const auto workers = static_cast<Index>(std::min<Index>(jobs, n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::vector<std::thread> pool;
  for (Index w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (Index i = begin + w; i < end; i += workers) {
        try {
          fn(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i - begin)] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace germrec
