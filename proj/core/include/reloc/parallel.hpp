#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace reloc {

/// 0 means "one per hardware thread".
inline unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls body(begin, end) on `workers` contiguous slices of [0, count).
/// Results must be written by index so that the outcome does not depend on
/// the partition. The first exception thrown by any slice is rethrown.
template <class Body>
void parallel_for(std::size_t count, unsigned workers, Body&& body) {
  workers = std::max(1u, workers);
  if (workers == 1 || count < 2) {
    if (count > 0) body(std::size_t{0}, count);
    return;
  }
  const std::size_t slices = std::min<std::size_t>(workers, count);
  std::vector<std::thread> threads;
  threads.reserve(slices);
  std::exception_ptr error;
  std::mutex error_mutex;
  for (std::size_t w = 0; w < slices; ++w) {
    const std::size_t begin = count * w / slices;
    const std::size_t end = count * (w + 1) / slices;
    threads.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace reloc
