#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace spdemax {

/// Runs body(i) for i in [0, count) across a small thread pool with static
/// partitioning. Bodies must be independent; results must be written to
/// per-index slots so that aggregation is order-insensitive.
template <typename Body>
void parallel_for(std::size_t count, const Body& body) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const std::size_t n_threads = std::min<std::size_t>(hw, count);
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) {
    workers.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += n_threads) body(i);
    });
  }
  for (auto& w : workers) w.join();
}

}  // namespace spdemax
