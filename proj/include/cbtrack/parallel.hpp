#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace cbtrack::detail {

/// Runs fn(i) for i in [0, n) across up to `jobs` threads with a static
/// block partition. Callers must write to disjoint locations; results are
/// then independent of the job count.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    const std::size_t begin = t * n / workers;
    const std::size_t end = (t + 1) * n / workers;
    threads.emplace_back([begin, end, &fn] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& th : threads) th.join();
}

}  // namespace cbtrack::detail
