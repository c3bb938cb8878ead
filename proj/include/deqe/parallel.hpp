#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace deqe {

// Resolves a requested worker count; 0 means "use the machine".
inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Splits [0, n) into `shards` contiguous ranges and runs fn(shard, begin, end)
// for each, one thread per shard. Shard boundaries depend only on n and
// shards, so callers that fold results in shard order stay deterministic.
template <typename Fn>
void for_each_shard(std::size_t n, unsigned shards, Fn&& fn) {
  shards = std::max(1u, shards);
  auto bound = [&](unsigned s) { return n * s / shards; };
  if (shards == 1) {
    fn(0u, std::size_t{0}, n);
    return;
  }
  std::vector<std::exception_ptr> errors(shards);
  {
    std::vector<std::jthread> workers;
    workers.reserve(shards);
    for (unsigned s = 0; s < shards; ++s) {
      workers.emplace_back([&, s] {
        try {
          fn(s, bound(s), bound(s + 1));
        } catch (...) {
          errors[s] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Hands out [0, n) in blocks of `grain` to `workers` threads as they free up.
// fn(worker, begin, end) must write only to state owned by the items it is
// given or by its worker slot.
template <typename Fn>
void for_each_block(std::size_t n, unsigned workers, std::size_t grain, Fn&& fn) {
  grain = std::max<std::size_t>(1, grain);
  std::atomic<std::size_t> next{0};
  for_each_shard(workers, workers, [&](unsigned worker, std::size_t, std::size_t) {
    for (;;) {
      const std::size_t begin = next.fetch_add(grain);
      if (begin >= n) return;
      fn(worker, begin, std::min(n, begin + grain));
    }
  });
}

}  // namespace deqe
