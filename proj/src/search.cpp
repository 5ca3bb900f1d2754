#include "flipmm/search.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <thread>

#include "walker.hpp"

namespace flipmm {

namespace {

template <class F>
RunState dispatch_words(const Format& f, F&& run) {
  const int bits = std::max({f.a_size(), f.b_size(), f.c_size()});
  if (bits <= 64) return run.template operator()<1>();
  if (bits <= 128) return run.template operator()<2>();
  if (bits <= 256) return run.template operator()<4>();
  if (bits <= 512) return run.template operator()<8>();
  return run.template operator()<16>();
}

RunState run_worker(const GF2Scheme& start, const SearchConfig& cfg, Rng& rng, int worker, BestRegister* shared,
                    std::atomic<bool>* stop) {
  return dispatch_words(start.format(), [&]<int W>() {
    detail::Walker<W> walker(start, cfg, rng, worker, shared, stop);
    return walker.run();
  });
}

void check_start(const GF2Scheme& start, const SearchConfig& cfg) {
  cfg.validate();
  if (!verify(start)) throw SchemeError("refusing to search from broken scheme");
}

}  // namespace

std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(rng()) * bound) >> 64);
}

void SearchConfig::validate() const {
  if (escape_after == 0 || restart_after == 0) throw std::invalid_argument("stall thresholds must be positive");
  if (workers < 1) throw std::invalid_argument("workers must be positive");
  if (max_splits_above_best < 0) throw std::invalid_argument("max_splits_above_best must be non-negative");
  if (max_seconds < 0) throw std::invalid_argument("max_seconds must be non-negative");
}

WalkCounters& WalkCounters::operator+=(const WalkCounters& o) {
  steps += o.steps;
  flips += o.flips;
  splits += o.splits;
  reductions += o.reductions;
  restarts += o.restarts;
  adoptions += o.adoptions;
  flip_drops += o.flip_drops;
  reduce_by_one += o.reduce_by_one;
  reduce_by_two += o.reduce_by_two;
  return *this;
}

bool equivalent(const RunState& x, const RunState& y) {
  return x.best == y.best && x.start_rank == y.start_rank && x.counters == y.counters && x.rngs == y.rngs &&
         x.history == y.history && x.target_reached == y.target_reached;
}

BestRegister::BestRegister(GF2Scheme start, ImprovementCallback on_improvement)
    : rank_(start.size()), best_(std::move(start)), on_improvement_(std::move(on_improvement)) {}

bool BestRegister::offer(const GF2Scheme& s, Improvement event) {
  std::lock_guard lock(mutex_);
  if (s.size() >= rank_.load(std::memory_order_relaxed)) return false;
  best_ = s;
  trace_.push_back(event);
  rank_.store(s.size(), std::memory_order_release);
  if (on_improvement_) on_improvement_(best_, event);
  return true;
}

GF2Scheme BestRegister::best() const {
  std::lock_guard lock(mutex_);
  return best_;
}

std::vector<Improvement> BestRegister::trace() const {
  std::lock_guard lock(mutex_);
  return trace_;
}

RunState walk(const GF2Scheme& start, const SearchConfig& cfg, Rng& rng) {
  check_start(start, cfg);
  return run_worker(start, cfg, rng, 0, nullptr, nullptr);
}

RunState orchestrate(const GF2Scheme& start, const SearchConfig& cfg, const ImprovementCallback& on_improvement) {
  check_start(start, cfg);
  const auto started = std::chrono::steady_clock::now();

  const GF2Scheme initial = normalize(start);
  BestRegister shared(initial, on_improvement);
  std::atomic<bool> stop{false};

  std::vector<Rng> rngs;
  for (int w = 0; w < cfg.workers; ++w) rngs.emplace_back(worker_seed(cfg.seed, w));
  std::vector<std::optional<RunState>> results(static_cast<std::size_t>(cfg.workers));

  if (cfg.workers == 1) {
    RunState only = run_worker(start, cfg, rngs[0], 0, &shared, &stop);
    only.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return only;
  }
  {
    std::vector<std::exception_ptr> errors(results.size());
    std::vector<std::jthread> threads;
    for (int w = 0; w < cfg.workers; ++w)
      threads.emplace_back([&, w] {
        try {
          results[w] = run_worker(start, cfg, rngs[w], w, &shared, &stop);
        } catch (...) {
          errors[w] = std::current_exception();
          stop = true;
        }
      });
    threads.clear();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  RunState merged{initial, 0, {}, {}, {}, false, 0.0};
  merged.start_rank = results[0]->start_rank;
  merged.history.push_back(results[0]->history.front());
  for (const auto& r : results) {
    merged.counters += r->counters;
    merged.rngs.insert(merged.rngs.end(), r->rngs.begin(), r->rngs.end());
    merged.target_reached = merged.target_reached || r->target_reached;
  }
  // Initial reductions inside the walkers are not offered to the register.
  const RunState* best_worker = &*results[0];
  for (const auto& r : results)
    if (r->best.size() < best_worker->best.size()) best_worker = &*r;
  const GF2Scheme global = shared.best();
  merged.best = global.size() <= best_worker->best.size() ? global : best_worker->best;
  for (const auto& ev : shared.trace()) merged.history.push_back(ev);
  merged.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return merged;
}

}  // namespace flipmm
