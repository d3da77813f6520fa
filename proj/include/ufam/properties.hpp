#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "ufam/binomial.hpp"
#include "ufam/family.hpp"

namespace ufam {

/// Incremental record of achievable unions. Level j holds the inclusion-maximal
/// masks among unions of at most j tracked members, as an antichain.
class UnionProfile {
 public:
  explicit UnionProfile(int levels) : levels_(static_cast<std::size_t>(levels)) {
    if (levels < 1) throw std::invalid_argument("UnionProfile needs at least one level");
  }

  int levels() const { return static_cast<int>(levels_.size()); }
  std::size_t members() const { return members_; }
  const std::vector<Mask>& level(int j) const { return levels_.at(static_cast<std::size_t>(j - 1)); }

  /// Adds a member. Returns the masks newly stored at the top level.
  std::vector<Mask> add(Mask m) {
    std::vector<Mask> top_new;
    const std::size_t top = levels_.size() - 1;
    // Top-down so each level j combines m with the level j-1 content before this add.
    for (std::size_t j = top; j >= 1; --j) {
      // Level j-1 is not modified in this iteration, so iterating it directly is safe.
      for (Mask prev : levels_[j - 1]) {
        Mask u = prev | m;
        if (insert(levels_[j], u) && j == top) top_new.push_back(u);
      }
      // m on its own is a union of at most j members too.
      if (insert(levels_[j], m) && j == top) top_new.push_back(m);
    }
    if (insert(levels_[0], m) && top == 0) top_new.push_back(m);
    ++members_;
    return top_new;
  }

  /// Largest union of at most `levels()` tracked members (0 when empty).
  int max_union() const { return max_union_at(levels()); }

  int max_union_at(int j) const {
    int best = 0;
    for (Mask u : level(j)) best = std::max(best, popcount(u));
    return best;
  }

  /// Largest |m ∪ U| over top-level unions U: the biggest union of m with at most
  /// `levels()` tracked members.
  int extension_union(Mask m) const {
    int best = popcount(m);
    for (Mask u : levels_.back()) best = std::max(best, popcount(u | m));
    return best;
  }

 private:
  // Keeps the vector an antichain under inclusion.
  static bool insert(std::vector<Mask>& level, Mask u) {
    for (Mask v : level)
      if ((u & ~v) == 0) return false;
    std::erase_if(level, [u](Mask v) { return (v & ~u) == 0; });
    level.push_back(u);
    return true;
  }

  std::vector<std::vector<Mask>> levels_;
  std::size_t members_ = 0;
};

/// max |F_1 ∪ ... ∪ F_s| over members of G (repeats allowed, which never helps).
inline int max_union(const Family& g, int s) {
  if (s < 1) throw std::invalid_argument("max_union requires s >= 1");
  if (g.empty()) return 0;
  const auto& masks = g.masks();
  const int cap = popcount(g.support());
  const int k = g.k();
  int best = 0;
  auto dfs = [&](auto&& self, std::size_t start, int picks_left, Mask cur) -> void {
    int c = popcount(cur);
    if (c > best) best = c;
    if (picks_left == 0 || best == cap) return;
    if (c + picks_left * k <= best) return;
    for (std::size_t i = start; i < masks.size() && best < cap; ++i) {
      if ((masks[i] & ~cur) == 0) continue;
      self(self, i + 1, picks_left - 1, cur | masks[i]);
    }
  };
  dfs(dfs, 0, s, 0);
  return best;
}

/// Property U(s,q): every s members have union of size at most q.
inline bool has_U(const Family& g, int s, int q) { return max_union(g, s) <= q; }

/// Maximum number of pairwise disjoint members.
inline int matching_number(const Family& g) {
  if (g.empty()) return 0;
  std::vector<Mask> order = g.masks();
  // Smallest minimum element first, colex among ties.
  std::stable_sort(order.begin(), order.end(),
                   [](Mask a, Mask b) { return std::countr_zero(a) < std::countr_zero(b); });
  const int k = std::max(1, g.k());
  const Mask support = g.support();
  const int ceiling = std::min<int>(static_cast<int>(order.size()), popcount(support) / k);
  int best = 0;
  auto dfs = [&](auto&& self, std::size_t start, Mask used, int count) -> void {
    if (count > best) best = count;
    if (best == ceiling) return;
    int room = popcount(support & ~used) / k;
    if (count + std::min<int>(room, static_cast<int>(order.size() - start)) <= best) return;
    for (std::size_t i = start; i < order.size() && best < ceiling; ++i)
      if ((order[i] & used) == 0) self(self, i + 1, used | order[i], count + 1);
  };
  dfs(dfs, 0, 0, 0);
  return best;
}

inline bool is_t_intersecting(const Family& g, int t) {
  if (t < 1 || t > g.k()) throw std::invalid_argument("is_t_intersecting requires 1 <= t <= k");
  const auto& m = g.masks();
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j)
      if (popcount(m[i] & m[j]) < t) return false;
  return true;
}

/// True iff no choice of one member per family is pairwise disjoint.
/// The same family may appear several times in the list.
inline bool are_cross_dependent(std::span<const Family> families) {
  if (families.empty()) throw std::invalid_argument("are_cross_dependent needs at least one family");
  for (const auto& f : families)
    if (f.ground() != families[0].ground() || f.k() != families[0].k())
      throw std::invalid_argument("cross-dependence needs a shared ground and uniformity");
  std::vector<const Family*> order;
  for (const auto& f : families) order.push_back(&f);
  std::sort(order.begin(), order.end(), [](const Family* a, const Family* b) { return a->size() < b->size(); });
  auto search = [&](auto&& self, std::size_t idx, Mask used) -> bool {
    if (idx == order.size()) return true;
    for (Mask m : order[idx]->masks())
      if ((m & used) == 0 && self(self, idx + 1, used | m)) return true;
    return false;
  };
  return !search(search, 0, 0);
}

inline bool are_cross_dependent(std::initializer_list<Family> families) {
  return are_cross_dependent(std::span<const Family>(families.begin(), families.size()));
}

/// Cross-check of two equivalences between U and classical properties:
///   U(2, 2k-t)        <=> t-intersecting
///   U(s+1, (s+1)k-1)  <=> matching number at most s
struct UEquivalenceReport {
  bool u_intersecting = false;
  bool t_intersecting = false;
  bool u_matching = false;
  bool matching_at_most_s = false;

  bool intersecting_equivalence_holds() const { return u_intersecting == t_intersecting; }
  bool matching_equivalence_holds() const { return u_matching == matching_at_most_s; }
  bool holds() const { return intersecting_equivalence_holds() && matching_equivalence_holds(); }
};

inline UEquivalenceReport u_equivalences_check(const Family& g, int s, int t) {
  if (s < 1) throw std::invalid_argument("u_equivalences_check requires s >= 1");
  const int k = g.k();
  UEquivalenceReport r;
  r.u_intersecting = has_U(g, 2, 2 * k - t);
  r.t_intersecting = is_t_intersecting(g, t);
  r.u_matching = has_U(g, s + 1, (s + 1) * k - 1);
  r.matching_at_most_s = matching_number(g) <= s;
  return r;
}

/// Shadow/matching inequality: nu(G) <= s implies s |shadow(G)| >= |G|.
/// Returns true when the implication holds (vacuously when nu(G) > s).
inline bool shadow_matching_inequality_holds(const Family& g, int s) {
  if (g.empty() || g.k() < 1) return true;
  if (matching_number(g) > s) return true;
  return static_cast<Count>(s) * static_cast<Count>(shadow(g).size()) >= static_cast<Count>(g.size());
}

/// Left side of the nested cross-dependent inequality:
///   |G_1| + ... + |G_s| + u |G_{s+1}|   against   s C(N, l).
struct CrossDependentSum {
  Count lhs = 0;
  Count rhs = 0;
  bool holds() const { return lhs <= rhs; }
};

inline CrossDependentSum cross_dependent_sum(std::span<const Family> tuple, int u) {
  if (tuple.size() < 2) throw std::invalid_argument("need s+1 >= 2 families");
  const int s = static_cast<int>(tuple.size()) - 1;
  CrossDependentSum r;
  for (int i = 0; i < s; ++i) r.lhs += static_cast<Count>(tuple[static_cast<std::size_t>(i)].size());
  r.lhs += static_cast<Count>(u) * static_cast<Count>(tuple.back().size());
  r.rhs = static_cast<Count>(s) * binom(tuple[0].ground(), tuple[0].k());
  return r;
}

inline bool is_nested(std::span<const Family> tuple) {
  for (std::size_t i = 1; i < tuple.size(); ++i)
    for (Mask m : tuple[i].masks())
      if (!tuple[i - 1].contains(m)) return false;
  return true;
}

}  // namespace ufam
