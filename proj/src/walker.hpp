#pragma once

// In-place flip-graph walker. Each walker owns its state exclusively; the
// public move functions in moves.hpp are the reference semantics and the
// tests check this engine against them through verify().

#include <array>
#include <atomic>
#include <bit>
#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "flipmm/moves.hpp"
#include "flipmm/search.hpp"

namespace flipmm::detail {

/// Row-major bit string of one component, W 64-bit words.
template <int W>
struct Bits {
  std::array<std::uint64_t, W> w{};

  bool is_zero() const {
    for (auto x : w)
      if (x) return false;
    return true;
  }
  Bits& operator^=(const Bits& o) {
    for (int i = 0; i < W; ++i) w[i] ^= o.w[i];
    return *this;
  }
  friend Bits operator^(Bits x, const Bits& y) { return x ^= y; }
  friend bool operator==(const Bits&, const Bits&) = default;
};

template <int W>
Bits<W> pack(const GF2Matrix& m) {
  Bits<W> b;
  const auto flat = m.flattened();
  for (std::size_t i = 0; i < flat.size(); ++i) b.w[i] = flat[i];
  return b;
}

template <int W>
GF2Matrix unpack(const Bits<W>& b, int rows, int cols) {
  GF2Matrix m(rows, cols);
  for (int word = 0; word < W; ++word)
    for (std::uint64_t x = b.w[word]; x; x &= x - 1) {
      const int pos = word * 64 + std::countr_zero(x);
      m.set(pos / cols, pos % cols, 1);
    }
  return m;
}

template <int W>
class Walker {
 public:
  Walker(const GF2Scheme& start, const SearchConfig& cfg, Rng& rng, int worker, BestRegister* shared,
         std::atomic<bool>* stop)
      : format_(start.format()),
        cfg_(cfg),
        rng_(rng),
        worker_(worker),
        shared_(shared),
        stop_(stop),
        best_(normalize(start)) {
    dims_[0] = {format_.n, format_.m};
    dims_[1] = {format_.m, format_.p};
    dims_[2] = {format_.p, format_.n};
    start_rank_ = best_.size();
    load(best_);
    if (rank() < start_rank_) {
      best_ = to_scheme();
      if (!verify(best_)) throw std::logic_error("initial reductions broke the scheme");
    }
    best_rank_ = rank();
    last_rank_ = rank();
  }

  RunState run() {
    using Clock = std::chrono::steady_clock;
    const auto started = Clock::now();
    history_.push_back({0, best_rank_, worker_});
    bool target_reached = cfg_.target_rank && best_rank_ <= *cfg_.target_rank;

    const std::size_t cap = static_cast<std::size_t>(cfg_.max_splits_above_best);
    while (!target_reached && counters_.steps < cfg_.max_steps) {
      if ((counters_.steps & 1023) == 0) {
        if (stop_ && stop_->load(std::memory_order_relaxed)) break;
        if (cfg_.max_seconds > 0 &&
            std::chrono::duration<double>(Clock::now() - started).count() >= cfg_.max_seconds)
          break;
        adopt_shared_best();
      }

      const bool may_split = rank() + 1 <= best_rank_ + cap && counters_.steps + 2 <= cfg_.max_steps;
      if (total_flips() == 0 || (stall_ >= cfg_.escape_after && may_split)) {
        const bool escaped = may_split && try_escape();
        stall_ = 0;
        if (escaped) {
          target_reached = after_move();
          continue;
        }
        if (total_flips() == 0) {
          // No flip here, no escape possible: stop once even the best is stuck.
          if (rank() == best_rank_ && no_flips_in_best_) break;
          restart();
          continue;
        }
      }

      if (since_best_ >= cfg_.restart_after) {
        restart();
        continue;
      }

      random_flip();
      target_reached = after_move();
    }

    RunState out{best_, start_rank_, counters_, {rng_}, history_, target_reached, 0.0};
    out.seconds = std::chrono::duration<double>(Clock::now() - started).count();
    return out;
  }

 private:
  struct Pair {
    std::uint32_t i, j;
  };

  std::size_t rank() const { return comp_[0].size(); }
  std::size_t total_flips() const { return pairs_[0].size() + pairs_[1].size() + pairs_[2].size(); }

  static int next(int s) { return (s + 1) % 3; }
  static int prev(int s) { return (s + 2) % 3; }

  void load(const GF2Scheme& s) {
    for (int k = 0; k < 3; ++k) {
      comp_[k].clear();
      for (const auto& t : s.terms()) comp_[k].push_back(pack<W>(t[static_cast<Slot>(k)]));
    }
    reduce_all();
    rebuild();
    no_flips_in_best_ = total_flips() == 0;
  }

  GF2Scheme to_scheme() const {
    std::vector<GF2Term> terms;
    terms.reserve(rank());
    for (std::size_t t = 0; t < rank(); ++t)
      terms.push_back({unpack<W>(comp_[0][t], dims_[0][0], dims_[0][1]),
                       unpack<W>(comp_[1][t], dims_[1][0], dims_[1][1]),
                       unpack<W>(comp_[2][t], dims_[2][0], dims_[2][1])});
    return GF2Scheme(format_, Ring::gf2(), std::move(terms));
  }

  int shared_slots(std::size_t x, std::size_t y) const {
    return (comp_[0][x] == comp_[0][y]) + (comp_[1][x] == comp_[1][y]) + (comp_[2][x] == comp_[2][y]);
  }

  void remove_term(std::size_t t) {
    for (auto& c : comp_) {
      c[t] = c.back();
      c.pop_back();
    }
  }

  bool drop_zero_terms() {
    bool dropped = false;
    for (std::size_t t = rank(); t-- > 0;)
      if (comp_[0][t].is_zero() || comp_[1][t].is_zero() || comp_[2][t].is_zero()) {
        remove_term(t);
        dropped = true;
      }
    return dropped;
  }

  // Greedy: merge any pair sharing two slots, rescan until none is left.
  void reduce_all() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t x = 0; x < rank() && !changed; ++x)
        for (std::size_t y = x + 1; y < rank() && !changed; ++y) {
          const int shared = shared_slots(x, y);
          if (shared < 2) continue;
          if (shared == 3) {
            remove_term(y);
            remove_term(x);
            ++counters_.reduce_by_two;
          } else {
            for (auto& c : comp_)
              if (c[x] != c[y]) c[x] ^= c[y];
            remove_term(y);
            ++counters_.reduce_by_one;
          }
          ++counters_.reductions;
          changed = true;
        }
    }
  }

  void rebuild() {
    if (cap_ < rank() + 4) {
      cap_ = rank() + 16;
      for (auto& p : pos_) p.assign(cap_ * cap_, -1);
    } else {
      for (auto& p : pos_) std::fill(p.begin(), p.end(), -1);
    }
    for (int s = 0; s < 3; ++s) {
      pairs_[s].clear();
      for (std::size_t x = 0; x < rank(); ++x)
        for (std::size_t y = x + 1; y < rank(); ++y)
          if (comp_[s][x] == comp_[s][y]) add_pair(s, x, y);
    }
  }

  void add_pair(int s, std::size_t x, std::size_t y) {
    if (x > y) std::swap(x, y);
    pos_[s][x * cap_ + y] = static_cast<std::int32_t>(pairs_[s].size());
    pairs_[s].push_back({static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y)});
  }

  void remove_pair(int s, std::size_t x, std::size_t y) {
    if (x > y) std::swap(x, y);
    const std::int32_t idx = pos_[s][x * cap_ + y];
    const Pair last = pairs_[s].back();
    pairs_[s][idx] = last;
    pos_[s][last.i * cap_ + last.j] = idx;
    pairs_[s].pop_back();
    pos_[s][x * cap_ + y] = -1;
  }

  // Sets slot s of term t to v and updates the flip pairs. Returns true if t
  // now shares two slots with another term.
  bool change_component(int s, std::size_t t, const Bits<W>& v) {
    auto& c = comp_[s];
    for (std::size_t k = 0; k < rank(); ++k)
      if (k != t && c[k] == c[t]) remove_pair(s, k, t);
    c[t] = v;
    bool reducible = false;
    if (v.is_zero()) return false;
    const int o1 = next(s), o2 = prev(s);
    for (std::size_t k = 0; k < rank(); ++k)
      if (k != t && c[k] == v) {
        add_pair(s, k, t);
        if (comp_[o1][k] == comp_[o1][t] || comp_[o2][k] == comp_[o2][t]) reducible = true;
      }
    return reducible;
  }

  // Applies flip (i, j, s, d); returns true if a reduction or zero term arose.
  bool apply_flip(std::size_t i, std::size_t j, int s, int d) {
    const int grow = d == 0 ? next(s) : prev(s);
    const int shrink = d == 0 ? prev(s) : next(s);
    bool pending = change_component(grow, i, comp_[grow][i] ^ comp_[grow][j]);
    pending |= change_component(shrink, j, comp_[shrink][j] ^ comp_[shrink][i]);
    return pending || comp_[grow][i].is_zero() || comp_[shrink][j].is_zero();
  }

  void settle() {
    const std::size_t before = rank();
    if (drop_zero_terms()) counters_.flip_drops += before - rank();
    reduce_all();
    rebuild();
  }

  void random_flip() {
    const std::size_t total = total_flips();
    std::size_t idx = uniform_below(rng_, total);
    int s = 0;
    while (idx >= pairs_[s].size()) idx -= pairs_[s++].size();
    const Pair pr = pairs_[s][idx];
    const std::uint64_t bits = uniform_below(rng_, 4);
    const std::size_t i = (bits & 1) ? pr.j : pr.i;
    const std::size_t j = (bits & 1) ? pr.i : pr.j;
    if (apply_flip(i, j, s, static_cast<int>(bits >> 1))) settle();
    ++counters_.flips;
    ++counters_.steps;
    ++stall_;
    ++since_best_;
  }

  Bits<W> random_mask(int s, const Bits<W>& avoid) {
    const int bits = dims_[s][0] * dims_[s][1];
    for (;;) {
      Bits<W> m;
      for (int word = 0; word < W; ++word) {
        const int left = bits - 64 * word;
        if (left <= 0) break;
        m.w[word] = rng_() & (left >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << left) - 1));
      }
      if (!m.is_zero() && m != avoid) return m;
    }
  }

  // Split one term into two and immediately flip one half with a third
  // term so that the halves no longer form a reducible pair.
  bool try_escape() {
    struct Candidate {
      int half;  // 0: the term kept at t, 1: the appended term
      std::size_t k;
      int shared;
      int changed;  // slot of the half that the flip modifies
    };
    for (int attempt = 0; attempt < 8; ++attempt) {
      const std::size_t t = uniform_below(rng_, rank());
      const int x = static_cast<int>(uniform_below(rng_, 3));
      const Bits<W> mask = random_mask(x, comp_[x][t]);
      std::array<std::array<Bits<W>, 3>, 2> halves;
      for (int s = 0; s < 3; ++s) halves[0][s] = halves[1][s] = comp_[s][t];
      halves[0][x] = mask;
      halves[1][x] = comp_[x][t] ^ mask;

      std::vector<Candidate> candidates;
      for (std::size_t k = 0; k < rank(); ++k) {
        if (k == t) continue;
        for (int h = 0; h < 2; ++h)
          for (int s = 0; s < 3; ++s) {
            if (comp_[s][k] != halves[h][s]) continue;
            for (int changed : {next(s), prev(s)})
              if (changed != x) candidates.push_back({h, k, s, changed});
          }
      }
      if (candidates.empty()) continue;

      const std::size_t second = rank();
      comp_[x][t] = halves[0][x];
      for (int s = 0; s < 3; ++s) comp_[s].push_back(halves[1][s]);
      rebuild();

      const Candidate& c = candidates[uniform_below(rng_, candidates.size())];
      const std::size_t h = c.half == 0 ? t : second;
      apply_flip(h, c.k, c.shared, c.changed == next(c.shared) ? 0 : 1);
      settle();

      ++counters_.splits;
      ++counters_.flips;
      counters_.steps += 2;
      since_best_ += 2;
      return true;
    }
    return false;
  }

  void restart() {
    load(best_);
    last_rank_ = rank();
    since_best_ = 0;
    stall_ = 0;
    ++counters_.restarts;
  }

  void adopt_shared_best() {
    if (!shared_ || shared_->rank() >= best_rank_) return;
    best_ = shared_->best();
    best_rank_ = best_.size();
    load(best_);
    last_rank_ = rank();
    since_best_ = 0;
    stall_ = 0;
    ++counters_.adoptions;
  }

  // Bookkeeping after a flip or escape. Returns true once the target is met.
  bool after_move() {
    if (rank() < last_rank_) stall_ = 0;
    last_rank_ = rank();
    if (rank() >= best_rank_) return false;

    GF2Scheme found = to_scheme();
    if (!verify(found)) throw std::logic_error("walker produced a scheme that does not verify");
    best_ = std::move(found);
    best_rank_ = rank();
    since_best_ = 0;
    const Improvement event{counters_.steps, best_rank_, worker_};
    history_.push_back(event);
    if (shared_) shared_->offer(best_, event);
    if (cfg_.target_rank && best_rank_ <= *cfg_.target_rank) {
      if (stop_) stop_->store(true, std::memory_order_relaxed);
      return true;
    }
    return false;
  }

  Format format_;
  std::array<std::array<int, 2>, 3> dims_{};
  const SearchConfig& cfg_;
  Rng& rng_;
  int worker_;
  BestRegister* shared_;
  std::atomic<bool>* stop_;

  std::vector<Bits<W>> comp_[3];
  std::vector<Pair> pairs_[3];
  std::vector<std::int32_t> pos_[3];
  std::size_t cap_ = 0;

  GF2Scheme best_;
  std::size_t best_rank_ = 0;
  std::size_t start_rank_ = 0;
  std::size_t last_rank_ = 0;
  bool no_flips_in_best_ = false;
  std::uint64_t stall_ = 0;
  std::uint64_t since_best_ = 0;
  WalkCounters counters_;
  std::vector<Improvement> history_;
};

}  // namespace flipmm::detail
