#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <vector>

#include "flipmm/scheme.hpp"

namespace flipmm {

/// Random source for all searches: 64-bit Mersenne Twister (std::mt19937_64),
/// whose output sequence is fixed by the C++ standard. Bounded draws use
/// uniform_below, never std::uniform_int_distribution, so streams agree
/// across standard library implementations.
using Rng = std::mt19937_64;

/// floor(x * bound / 2^64) for the next 64-bit output x. bound must be > 0.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

/// Seed of worker `index` in a multi-worker run.
inline std::uint64_t worker_seed(std::uint64_t seed, int index) {
  return seed ^ static_cast<std::uint64_t>(index);
}

struct SearchConfig {
  /// Flip and split budget per worker.
  std::uint64_t max_steps = 1'000'000;
  /// Steps without a rank decrease before an escape split is tried.
  std::uint64_t escape_after = 10'000;
  /// A split may raise the rank to at most best + this value.
  int max_splits_above_best = 3;
  /// Steps without improving the best rank before restarting from the best.
  std::uint64_t restart_after = 1'000'000;
  std::uint64_t seed = 0;
  int workers = 1;
  /// Stop as soon as a scheme of at most this rank is found.
  std::optional<std::size_t> target_rank;
  /// Wall-clock limit per run in seconds; 0 disables it. Runs cut short by
  /// the clock are not reproducible.
  double max_seconds = 0;

  /// Throws std::invalid_argument if a count is zero or negative.
  void validate() const;
};

struct Improvement {
  std::uint64_t step = 0;
  std::size_t rank = 0;
  int worker = 0;

  friend bool operator==(const Improvement&, const Improvement&) = default;
};

struct WalkCounters {
  std::uint64_t steps = 0;
  std::uint64_t flips = 0;
  std::uint64_t splits = 0;
  std::uint64_t reductions = 0;
  std::uint64_t restarts = 0;
  /// Times a worker jumped to a better scheme published by another worker.
  std::uint64_t adoptions = 0;
  /// Rank change bookkeeping, one counter per cause.
  std::uint64_t flip_drops = 0;
  std::uint64_t reduce_by_one = 0;
  std::uint64_t reduce_by_two = 0;

  WalkCounters& operator+=(const WalkCounters& o);
  friend bool operator==(const WalkCounters&, const WalkCounters&) = default;
};

struct RunState {
  GF2Scheme best;
  std::size_t start_rank = 0;
  WalkCounters counters;
  /// Final generator state of each worker.
  std::vector<Rng> rngs;
  /// (step, rank) each time the best rank dropped; first entry is the start.
  std::vector<Improvement> history;
  bool target_reached = false;
  double seconds = 0;
};

/// Same outcome ignoring wall-clock time.
bool equivalent(const RunState& x, const RunState& y);

using ImprovementCallback = std::function<void(const GF2Scheme&, const Improvement&)>;

/// Monotone best-so-far slot shared by concurrent walkers. The rank word can
/// be read without locking and may be stale; it never increases.
class BestRegister {
 public:
  explicit BestRegister(GF2Scheme start, ImprovementCallback on_improvement = {});

  std::size_t rank() const { return rank_.load(std::memory_order_acquire); }
  /// Stores `s` if its rank beats the current one. `s` must verify.
  bool offer(const GF2Scheme& s, Improvement event);
  GF2Scheme best() const;
  std::vector<Improvement> trace() const;

 private:
  std::atomic<std::size_t> rank_;
  mutable std::mutex mutex_;
  GF2Scheme best_;
  std::vector<Improvement> trace_;
  ImprovementCallback on_improvement_;
};

/// Random flip-graph walk. Each step: exhaust reductions, then apply one
/// uniformly random flip. After cfg.escape_after steps without a rank drop a
/// split is injected (rank + 1, bounded by best + max_splits_above_best);
/// after cfg.restart_after steps without a new best the walk resumes from the
/// best scheme. Throws SchemeError("refusing to search from broken scheme")
/// unless `start` verifies.
RunState walk(const GF2Scheme& start, const SearchConfig& cfg, Rng& rng);

/// cfg.workers walkers seeded with worker_seed(cfg.seed, w), sharing one
/// BestRegister. With one worker the result equals walk() with Rng(cfg.seed).
RunState orchestrate(const GF2Scheme& start, const SearchConfig& cfg, const ImprovementCallback& on_improvement = {});

}  // namespace flipmm
