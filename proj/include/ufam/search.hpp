#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "ufam/catalog.hpp"
#include "ufam/family.hpp"
#include "ufam/properties.hpp"

namespace ufam {

enum class SearchStatus { ProvedOptimal, BudgetExhausted, TargetReached };

inline const char* to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::ProvedOptimal: return "proved-optimal";
    case SearchStatus::BudgetExhausted: return "budget-exhausted";
    case SearchStatus::TargetReached: return "target-reached";
  }
  return "?";
}

inline SearchStatus search_status_from_string(const std::string& s) {
  if (s == "proved-optimal") return SearchStatus::ProvedOptimal;
  if (s == "budget-exhausted") return SearchStatus::BudgetExhausted;
  if (s == "target-reached") return SearchStatus::TargetReached;
  throw std::invalid_argument("unknown search status '" + s + "'");
}

/// Limits for one search. Unset fields mean unlimited.
struct SearchBudget {
  std::optional<std::uint64_t> max_nodes;
  std::optional<double> max_seconds;
  std::optional<Count> target;  // stop as soon as the best value reaches this

  static SearchBudget unlimited() { return {}; }
  static SearchBudget nodes(std::uint64_t n) { return {n, std::nullopt, std::nullopt}; }
  static SearchBudget seconds(double s) { return {std::nullopt, s, std::nullopt}; }
};

/// Resume point for a shifted search. `prefix` holds the include (1) / exclude (0)
/// decision for each candidate on the interrupted path; `first_done` marks the
/// positions where the path is already in the second branch of that node.
struct Checkpoint {
  ParamQuad quad;
  bool restricted = true;
  std::string prefix;
  std::string first_done;
  Count best_value = 0;
  std::vector<Mask> best_witness;
};

struct SearchOutcome {
  Count value = 0;
  Family witness;
  std::uint64_t nodes = 0;
  double elapsed_ms = 0;
  SearchStatus status = SearchStatus::ProvedOptimal;
  std::optional<Checkpoint> checkpoint;  // set when the budget ran out (single thread)
};

struct SearchOptions {
  /// Restrict candidates to the union of the A(p+is, r+i); lossless for shifted families.
  bool restrict_universe = true;
  /// Seed the incumbent with the best construction.
  bool seed_with_construction = true;
  int threads = 1;
  std::optional<Checkpoint> resume;
};

namespace detail {

using Clock = std::chrono::steady_clock;

class Bits {
 public:
  Bits() = default;
  explicit Bits(std::size_t n) : w_((n + 63) / 64, 0) {}
  bool test(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::size_t i) { w_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) { w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  void clear() { std::fill(w_.begin(), w_.end(), 0); }
  const std::vector<std::uint64_t>& words() const { return w_; }
  std::vector<std::uint64_t>& words() { return w_; }

 private:
  std::vector<std::uint64_t> w_;
};

/// State shared by cooperating workers: incumbent value, witness, stop flag.
struct SharedIncumbent {
  std::atomic<Count> best{0};
  std::atomic<bool> stop{false};
  std::atomic<std::uint64_t> nodes{0};
  std::mutex mu;
  std::vector<Mask> witness;
  SearchStatus stop_reason = SearchStatus::ProvedOptimal;

  /// Monotone update; returns true if `value` became the new incumbent.
  bool offer(Count value, const std::vector<Mask>& w) {
    Count cur = best.load();
    while (value > cur) {
      if (best.compare_exchange_weak(cur, value)) {
        std::lock_guard lock(mu);
        if (value >= best.load()) witness = w;
        return true;
      }
    }
    return false;
  }
};

/// Include/exclude branch-and-bound over shifted families, processing candidates
/// in colex order. Including a candidate requires all its immediate predecessors;
/// a candidate that can no longer be included is excluded without branching.
class ShiftedEngine {
 public:
  ShiftedEngine(const ParamQuad& pq, std::vector<Mask> candidates, Count construction_value,
                SharedIncumbent& shared, const SearchBudget& budget, Clock::time_point start)
      : pq_(pq),
        cand_(std::move(candidates)),
        m_(static_cast<int>(cand_.size())),
        construction_value_(construction_value),
        shared_(shared),
        budget_(budget),
        start_(start),
        in_(cand_.size()),
        incompat_(cand_.size()),
        avail_(cand_.size()),
        profile_(pq.s - 1),
        decision_(cand_.size(), 0),
        first_done_(cand_.size(), 0) {
    std::unordered_map<Mask, int> index;
    for (int i = 0; i < m_; ++i) index.emplace(cand_[static_cast<std::size_t>(i)], i);
    preds_.resize(cand_.size());
    for (int i = 0; i < m_; ++i) {
      for (Mask p : immediate_predecessors(cand_[static_cast<std::size_t>(i)])) {
        auto it = index.find(p);
        if (it == index.end()) throw std::logic_error("candidate universe is not a down-set");
        preds_[static_cast<std::size_t>(i)].push_back(it->second);
      }
    }
  }

  void set_enumerate(bool on) { enumerate_ = on; }
  const std::vector<std::vector<Mask>>& maximizers() const { return maximizers_; }
  std::uint64_t local_nodes() const { return nodes_; }
  const std::optional<Checkpoint>& checkpoint() const { return checkpoint_; }

  /// Applies a fixed decision prefix (from a split or a checkpoint) without branching.
  bool replay(const std::string& prefix) {
    for (std::size_t i = 0; i < prefix.size(); ++i) {
      int c = static_cast<int>(i);
      if (prefix[i] == '1') {
        if (!can_include(c)) return false;
        include(c);
      } else {
        decision_[i] = 0;
      }
    }
    return true;
  }

  void run(int from, const std::string* resume_prefix = nullptr, const std::string* resume_done = nullptr) {
    resume_prefix_ = resume_prefix;
    resume_done_ = resume_done;
    progressed_ = resume_prefix == nullptr;
    dfs(from);
  }

  /// Collects decision prefixes of the first `depth` branching nodes.
  void split(int from, int depth, std::vector<std::string>& tasks) {
    split_depth_ = depth;
    split_tasks_ = &tasks;
    dfs(from);
    split_tasks_ = nullptr;
  }

 private:
  struct Saved {
    Bits incompat;
    UnionProfile profile;
  };

  bool can_include(int c) const {
    if (incompat_.test(static_cast<std::size_t>(c))) return false;
    for (int p : preds_[static_cast<std::size_t>(c)])
      if (!in_.test(static_cast<std::size_t>(p))) return false;
    return true;
  }

  void include(int c) {
    const Mask m = cand_[static_cast<std::size_t>(c)];
    in_.set(static_cast<std::size_t>(c));
    decision_[static_cast<std::size_t>(c)] = 1;
    ++size_;
    for (Mask u : profile_.add(m))
      for (int j = c + 1; j < m_; ++j)
        if (popcount(u | cand_[static_cast<std::size_t>(j)]) > pq_.q) incompat_.set(static_cast<std::size_t>(j));
  }

  /// Undecided candidates at positions >= from that can still join the family.
  int alive_count(int from) {
    avail_.words() = in_.words();
    int count = 0;
    for (int c = from; c < m_; ++c) {
      if (incompat_.test(static_cast<std::size_t>(c))) continue;
      bool ok = true;
      for (int p : preds_[static_cast<std::size_t>(c)])
        if (!avail_.test(static_cast<std::size_t>(p))) {
          ok = false;
          break;
        }
      if (ok) {
        avail_.set(static_cast<std::size_t>(c));
        ++count;
      }
    }
    return count;
  }

  bool out_of_budget() {
    if (shared_.stop.load(std::memory_order_relaxed)) return true;
    if (budget_.max_nodes && shared_.nodes.load(std::memory_order_relaxed) + nodes_ >= *budget_.max_nodes) return true;
    if (budget_.max_seconds && (nodes_ & 1023) == 0) {
      std::chrono::duration<double> el = Clock::now() - start_;
      if (el.count() >= *budget_.max_seconds) return true;
    }
    return false;
  }

  void halt(int idx, SearchStatus why) {
    if (!shared_.stop.exchange(true)) shared_.stop_reason = why;
    if (why == SearchStatus::BudgetExhausted && !checkpoint_) {
      Checkpoint cp;
      cp.quad = pq_;
      for (int i = 0; i < idx; ++i) {
        cp.prefix.push_back(decision_[static_cast<std::size_t>(i)] ? '1' : '0');
        cp.first_done.push_back(first_done_[static_cast<std::size_t>(i)] ? '1' : '0');
      }
      checkpoint_ = std::move(cp);
    }
  }

  std::vector<Mask> current_family() const {
    std::vector<Mask> out;
    for (int c = 0; c < m_; ++c)
      if (in_.test(static_cast<std::size_t>(c))) out.push_back(cand_[static_cast<std::size_t>(c)]);
    return out;
  }

  void dfs(int idx) {
    if (shared_.stop.load(std::memory_order_relaxed)) return;
    ++nodes_;
    // A resumed run finishes at least one subtree before it may stop again,
    // so chained small-budget runs always move forward.
    if (progressed_ && out_of_budget()) {
      halt(idx, SearchStatus::BudgetExhausted);
      return;
    }
    const Count best = shared_.best.load(std::memory_order_relaxed);
    const bool following = resume_prefix_ != nullptr && idx < static_cast<int>(resume_prefix_->size());

    if (idx == m_) {
      if (enumerate_) {
        if (size_ > best) {
          maximizers_.clear();
          shared_.best.store(size_);
        }
        if (size_ >= shared_.best.load()) maximizers_.push_back(current_family());
      } else if (size_ > best) {
        shared_.offer(size_, current_family());
        if (budget_.target && size_ >= *budget_.target) halt(idx, SearchStatus::TargetReached);
      }
      progressed_ = true;
      return;
    }

    if (!following) {
      const Count bound = size_ + alive_count(idx);
      if (enumerate_ ? bound < best : bound <= best) {
        progressed_ = true;
        return;
      }
    }

    if (!can_include(idx)) {
      decision_[static_cast<std::size_t>(idx)] = 0;
      first_done_[static_cast<std::size_t>(idx)] = 0;
      dfs(idx + 1);
      return;
    }

    if (split_tasks_ != nullptr && split_depth_ == 0) {
      std::string prefix;
      for (int i = 0; i < idx; ++i) prefix.push_back(decision_[static_cast<std::size_t>(i)] ? '1' : '0');
      split_tasks_->push_back(std::move(prefix));
      return;
    }

    bool include_first = best < construction_value_;
    bool skip_first = false;
    if (following) {
      // On the resume path: the path's branch is explored, and the other branch
      // too unless the path was already in the second branch of this node.
      const bool path_include = (*resume_prefix_)[static_cast<std::size_t>(idx)] == '1';
      skip_first = (*resume_done_)[static_cast<std::size_t>(idx)] == '1';
      include_first = skip_first ? !path_include : path_include;
    }
    branch_pair(idx, include_first, skip_first);
  }

  void branch_pair(int idx, bool include_first, bool skip_first) {
    if (split_tasks_ != nullptr) --split_depth_;
    for (int b = 0; b < 2; ++b) {
      if (b == 0 && skip_first) continue;
      if (b == 1 && shared_.stop.load(std::memory_order_relaxed)) break;
      const bool do_include = (b == 0) == include_first;
      first_done_[static_cast<std::size_t>(idx)] = b == 1 ? 1 : 0;
      if (do_include) {
        Saved saved{incompat_, profile_};
        include(idx);
        dfs(idx + 1);
        in_.reset(static_cast<std::size_t>(idx));
        decision_[static_cast<std::size_t>(idx)] = 0;
        --size_;
        incompat_ = std::move(saved.incompat);
        profile_ = std::move(saved.profile);
      } else {
        decision_[static_cast<std::size_t>(idx)] = 0;
        dfs(idx + 1);
      }
      // Whatever follows the first explored child is off the resume path.
      resume_prefix_ = nullptr;
    }
    first_done_[static_cast<std::size_t>(idx)] = 0;
    if (split_tasks_ != nullptr) ++split_depth_;
  }

  ParamQuad pq_;
  std::vector<Mask> cand_;
  int m_;
  Count construction_value_;
  SharedIncumbent& shared_;
  SearchBudget budget_;
  Clock::time_point start_;

  Bits in_;
  Bits incompat_;
  Bits avail_;
  UnionProfile profile_;
  std::vector<std::uint8_t> decision_;
  std::vector<std::uint8_t> first_done_;
  std::vector<std::vector<int>> preds_;
  Count size_ = 0;
  std::uint64_t nodes_ = 0;

  bool enumerate_ = false;
  std::vector<std::vector<Mask>> maximizers_;
  std::optional<Checkpoint> checkpoint_;
  const std::string* resume_prefix_ = nullptr;
  const std::string* resume_done_ = nullptr;
  bool progressed_ = true;
  int split_depth_ = 0;
  std::vector<std::string>* split_tasks_ = nullptr;
};

inline double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

inline std::vector<Mask> search_universe(const ParamQuad& pq, bool restrict) {
  return restrict ? candidate_universe(pq) : all_kset_masks(pq.n, pq.k);
}

}  // namespace detail

/// m(n,k,s,q) as the largest shifted family with property U(s,q).
inline SearchOutcome exact_m_shifted(const ParamQuad& pq, const SearchBudget& budget = {},
                                     const SearchOptions& options = {}) {
  using namespace detail;
  const auto start = Clock::now();
  const BoundRecord seed = conjecture_value(pq);
  const auto cands = conjecture_candidates(pq);
  const auto& best_cand = cands[static_cast<std::size_t>(*seed.argmax)];

  SharedIncumbent shared;
  if (options.seed_with_construction) {
    shared.best = seed.value;
    shared.witness = a_family(best_cand.p, best_cand.r, pq.n, pq.k).masks();
  }
  if (options.resume) {
    if (!(options.resume->quad == pq) || options.resume->restricted != options.restrict_universe)
      throw std::invalid_argument("checkpoint does not match this search");
    if (options.resume->best_value > shared.best) {
      shared.best = options.resume->best_value;
      shared.witness = options.resume->best_witness;
    }
  }

  SearchOutcome out;
  auto finish = [&](SearchStatus status) {
    out.value = shared.best.load();
    out.witness = Family(pq.n, pq.k, shared.witness);
    out.elapsed_ms = elapsed_ms(start);
    out.status = status;
    return out;
  };

  if (budget.target && shared.best.load() >= *budget.target) return finish(SearchStatus::TargetReached);

  const auto universe = search_universe(pq, options.restrict_universe);
  const int threads = std::max(1, options.threads);

  if (threads == 1 || options.resume) {
    ShiftedEngine engine(pq, universe, seed.value, shared, budget, start);
    if (options.resume) {
      const auto& cp = *options.resume;
      engine.run(0, &cp.prefix, &cp.first_done);
    } else {
      engine.run(0);
    }
    out.nodes = engine.local_nodes();
    SearchStatus status = shared.stop ? shared.stop_reason : SearchStatus::ProvedOptimal;
    finish(status);
    if (status == SearchStatus::BudgetExhausted && engine.checkpoint()) {
      out.checkpoint = engine.checkpoint();
      out.checkpoint->restricted = options.restrict_universe;
      out.checkpoint->best_value = out.value;
      out.checkpoint->best_witness = out.witness.masks();
    }
    return out;
  }

  // Split the top of the tree into prefixes and share them out.
  std::vector<std::string> tasks;
  {
    int depth = 0;
    while ((1 << depth) < threads * 8 && depth < 20) ++depth;
    ShiftedEngine splitter(pq, universe, seed.value, shared, budget, start);
    splitter.split(0, depth, tasks);
    shared.nodes += splitter.local_nodes();
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= tasks.size() || shared.stop.load()) break;
        ShiftedEngine engine(pq, universe, seed.value, shared, budget, start);
        if (engine.replay(tasks[i])) engine.run(static_cast<int>(tasks[i].size()));
        shared.nodes += engine.local_nodes();
      }
    });
  }
  for (auto& th : pool) th.join();
  out.nodes = shared.nodes.load();
  return finish(shared.stop ? shared.stop_reason : SearchStatus::ProvedOptimal);
}

/// Every shifted U(s,q) family of maximum size. Ties are kept, so the construction
/// seed only sets the pruning cutoff (a branch survives while its bound reaches it).
struct MaximizerList {
  Count value = 0;
  std::vector<Family> families;
  std::uint64_t nodes = 0;
  double elapsed_ms = 0;
  SearchStatus status = SearchStatus::ProvedOptimal;
};

inline MaximizerList enumerate_maximum_families(const ParamQuad& pq, const SearchBudget& budget = {},
                                                bool restrict_universe = true) {
  using namespace detail;
  const auto start = Clock::now();
  const BoundRecord seed = conjecture_value(pq);
  SharedIncumbent shared;
  shared.best = seed.value;
  ShiftedEngine engine(pq, search_universe(pq, restrict_universe), seed.value, shared, budget, start);
  engine.set_enumerate(true);
  engine.run(0);
  MaximizerList out;
  out.value = shared.best.load();
  for (const auto& w : engine.maximizers()) out.families.emplace_back(pq.n, pq.k, w);
  out.nodes = engine.local_nodes();
  out.elapsed_ms = elapsed_ms(start);
  out.status = shared.stop ? SearchStatus::BudgetExhausted : SearchStatus::ProvedOptimal;
  return out;
}

/// Largest number of k-subsets the brute-force oracle accepts.
inline constexpr Count kBruteForceLimit = 24;

/// m(n,k,s,q) over all families, with no shifting assumption. Include/exclude over
/// every k-set; a set is only included while the family keeps U(s,q).
inline SearchOutcome exact_m_bruteforce(const ParamQuad& pq) {
  using namespace detail;
  if (binom(pq.n, pq.k) > kBruteForceLimit)
    throw std::invalid_argument("brute force needs C(n,k) <= 24, got " + std::to_string(binom(pq.n, pq.k)));
  const auto start = Clock::now();
  const std::vector<Mask> sets = all_kset_masks(pq.n, pq.k);
  const int m = static_cast<int>(sets.size());

  std::vector<Mask> chosen;
  std::vector<Mask> best_family;
  Count best = 0;
  std::uint64_t nodes = 0;

  // blocked[j]: set j would break U(s,q) with the current choice.
  auto dfs = [&](auto&& self, int idx, UnionProfile& profile, std::vector<std::uint8_t>& blocked) -> void {
    ++nodes;
    Count room = 0;
    for (int j = idx; j < m; ++j) room += blocked[static_cast<std::size_t>(j)] ? 0 : 1;
    if (static_cast<Count>(chosen.size()) + room <= best) return;
    if (idx == m) {
      best = static_cast<Count>(chosen.size());
      best_family = chosen;
      return;
    }
    if (!blocked[static_cast<std::size_t>(idx)]) {
      UnionProfile next = profile;
      std::vector<std::uint8_t> next_blocked = blocked;
      for (Mask u : next.add(sets[static_cast<std::size_t>(idx)]))
        for (int j = idx + 1; j < m; ++j)
          if (popcount(u | sets[static_cast<std::size_t>(j)]) > pq.q) next_blocked[static_cast<std::size_t>(j)] = 1;
      chosen.push_back(sets[static_cast<std::size_t>(idx)]);
      self(self, idx + 1, next, next_blocked);
      chosen.pop_back();
    }
    self(self, idx + 1, profile, blocked);
  };
  UnionProfile profile(pq.s - 1);
  std::vector<std::uint8_t> blocked(sets.size(), 0);
  dfs(dfs, 0, profile, blocked);

  SearchOutcome out;
  out.value = best;
  out.witness = Family(pq.n, pq.k, best_family);
  out.nodes = nodes;
  out.elapsed_ms = elapsed_ms(start);
  out.status = SearchStatus::ProvedOptimal;
  return out;
}

}  // namespace ufam
