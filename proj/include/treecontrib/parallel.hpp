/**
 * Copyright 2026, treecontrib contributors
 */
#ifndef TREECONTRIB_PARALLEL_HPP_
#define TREECONTRIB_PARALLEL_HPP_

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace treecontrib {

// Fixed chunk size: the work split never depends on the thread count, so a
// caller that merges per-chunk results in chunk order gets identical output
// for any --threads value.
inline constexpr std::size_t kRowChunkSize = 256;

inline std::size_t chunk_count(std::size_t n, std::size_t chunk = kRowChunkSize) {
  return (n + chunk - 1) / chunk;
}

// Runs fn(chunk_index, begin, end) over [0, n) in chunks. Exceptions are
// rethrown on the calling thread (the lowest-index chunk's error wins).
inline void parallel_chunks(std::size_t n, int threads,
                            const std::function<void(std::size_t, std::size_t, std::size_t)>& fn,
                            std::size_t chunk = kRowChunkSize) {
  const std::size_t n_chunks = chunk_count(n, chunk);
  if (n_chunks == 0) return;

  auto run_chunk = [&](std::size_t c) {
    const std::size_t begin = c * chunk;
    const std::size_t end = begin + chunk < n ? begin + chunk : n;
    fn(c, begin, end);
  };

  const std::size_t n_workers =
      threads <= 1 ? 1 : std::min<std::size_t>(static_cast<std::size_t>(threads), n_chunks);
  if (n_workers == 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_chunk = n_chunks;
  std::exception_ptr error;

  auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      try {
        run_chunk(c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (c < error_chunk) {
          error_chunk = c;
          error = std::current_exception();
        }
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace treecontrib

#endif  // TREECONTRIB_PARALLEL_HPP_
