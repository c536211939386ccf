#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace ptflab {

// Thread count resolution: explicit request > PTF_LAB_THREADS > hardware.
inline unsigned resolve_threads(unsigned requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PTF_LAB_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Runs fn(block_index, begin, end) over [0, total) split into fixed-size
// blocks.  The block layout depends only on (total, block_size), never on the
// thread count, and callers reduce per-block results in block order, so any
// thread count reproduces the single-thread output bit for bit.
template <class Fn>
void for_blocks(std::uint64_t total, std::uint64_t block_size, unsigned threads, Fn&& fn) {
  if (total == 0) return;
  if (block_size == 0) block_size = 1;
  const std::uint64_t n_blocks = (total + block_size - 1) / block_size;
  threads = resolve_threads(threads);
  if (threads <= 1 || n_blocks == 1) {
    for (std::uint64_t b = 0; b < n_blocks; ++b)
      fn(b, b * block_size, std::min(total, (b + 1) * block_size));
    return;
  }
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::uint64_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      fn(b, b * block_size, std::min(total, (b + 1) * block_size));
    }
  };
  std::vector<std::thread> pool;
  unsigned use = static_cast<unsigned>(std::min<std::uint64_t>(threads, n_blocks));
  pool.reserve(use);
  for (unsigned t = 0; t < use; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

// Block-parallel sum of per-sample doubles; reduction in block order.
template <class PerSample>
double block_sum(std::uint64_t total, unsigned threads, PerSample&& per_sample,
                 std::uint64_t block_size = 1 << 13) {
  const std::uint64_t n_blocks = (total + block_size - 1) / block_size;
  std::vector<double> partial(n_blocks, 0.0);
  for_blocks(total, block_size, threads, [&](std::uint64_t b, std::uint64_t lo, std::uint64_t hi) {
    double acc = 0.0;
    for (std::uint64_t s = lo; s < hi; ++s) acc += per_sample(s);
    partial[b] = acc;
  });
  double sum = 0.0;
  for (double v : partial) sum += v;
  return sum;
}

// Block-parallel integer event count (exactly associative).
template <class PerSample>
std::int64_t block_count(std::uint64_t total, unsigned threads, PerSample&& per_sample,
                         std::uint64_t block_size = 1 << 13) {
  const std::uint64_t n_blocks = (total + block_size - 1) / block_size;
  std::vector<std::int64_t> partial(n_blocks, 0);
  for_blocks(total, block_size, threads, [&](std::uint64_t b, std::uint64_t lo, std::uint64_t hi) {
    std::int64_t acc = 0;
    for (std::uint64_t s = lo; s < hi; ++s) acc += per_sample(s) ? 1 : 0;
    partial[b] = acc;
  });
  std::int64_t sum = 0;
  for (auto v : partial) sum += v;
  return sum;
}

}  // namespace ptflab
