#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rrag {

/// Samples are cut into fixed-size blocks; block b draws from stream id b.
/// Results depend only on (seed, samples, block_size), never on worker count.
struct BlockRange {
  std::uint64_t index = 0;
  std::uint64_t begin = 0;
  std::uint64_t end = 0;
  std::uint64_t size() const noexcept { return end - begin; }
};

inline std::uint64_t block_count(std::uint64_t total, std::uint64_t block_size) {
  return (total + block_size - 1) / block_size;
}

/// Runs fn(BlockRange) for every block on up to `workers` threads and returns
/// the per-block results in block order. The first exception thrown by any
/// block is rethrown after all threads join.
template <typename Fn>
auto run_blocks(std::uint64_t total, std::uint64_t block_size, unsigned workers, Fn&& fn)
    -> std::vector<decltype(fn(BlockRange{}))> {
  using Result = decltype(fn(BlockRange{}));
  const std::uint64_t blocks = block_count(total, block_size);
  std::vector<Result> results(blocks);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::uint64_t b = next.fetch_add(1);
      if (b >= blocks) return;
      try {
        BlockRange r{b, b * block_size, std::min(total, (b + 1) * block_size)};
        results[b] = fn(r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(blocks);
        return;
      }
    }
  };

  const unsigned threads =
      static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, workers), std::max<std::uint64_t>(blocks, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace rrag
