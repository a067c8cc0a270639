#pragma once

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace turbid {

/// Runs fn(i) for i in [0, n) on the available hardware threads. Work items
/// must be independent; results are deterministic as long as fn writes
/// only to slots owned by i.
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
  const int workers = std::min<int>(n, static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto loop = [&] {
    for (int i = next++; i < n; i = next++) fn(i);
  };
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers - 1));
  for (int w = 1; w < workers; ++w) pool.emplace_back(loop);
  loop();
}

}  // namespace turbid
