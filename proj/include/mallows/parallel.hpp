#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

#include "mallows/rng.hpp"

namespace mallows {

/// Runs `trials` independent trials split into contiguous chunks over
/// `threads` workers. Trial t always sees Rng::child(seed, t), and each worker
/// owns an accumulator; accumulators are merged in worker order. With
/// integer-valued accumulators the result is independent of `threads`.
///
/// `fn(Rng&, std::uint64_t t, Acc&)`; `Acc` needs a `merge(const Acc&)`.
template <class Acc, class Fn>
Acc run_trials(std::uint64_t trials, unsigned threads, std::uint64_t seed, Fn fn) {
  threads = std::max(1u, threads);
  if (trials < threads) threads = static_cast<unsigned>(std::max<std::uint64_t>(1, trials));
  std::vector<Acc> accs(threads);
  auto work = [&](unsigned w) {
    const std::uint64_t begin = trials * w / threads;
    const std::uint64_t end = trials * (w + 1) / threads;
    for (std::uint64_t t = begin; t < end; ++t) {
      Rng rng = Rng::child(seed, t);
      fn(rng, t, accs[w]);
    }
  };
  if (threads == 1) {
    work(0);
    return std::move(accs[0]);
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        work(w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (unsigned w = 1; w < threads; ++w) accs[0].merge(accs[w]);
  return std::move(accs[0]);
}

}  // namespace mallows
