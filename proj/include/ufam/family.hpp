#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "ufam/kset.hpp"

namespace ufam {

/// A k-uniform family on [ground]. Members are distinct and kept in colex order,
/// so two families are equal iff their member vectors are equal.
class Family {
 public:
  Family() = default;

  Family(int ground, int k) : ground_(ground), k_(k) { validate_params(); }

  Family(int ground, int k, std::vector<Mask> masks) : ground_(ground), k_(k), masks_(std::move(masks)) {
    validate_params();
    normalize();
  }

  Family(int ground, int k, std::span<const KSet> sets) : ground_(ground), k_(k) {
    validate_params();
    masks_.reserve(sets.size());
    for (const auto& s : sets) {
      if (s.ground() != ground) throw std::invalid_argument("member ground size mismatch");
      masks_.push_back(s.mask());
    }
    normalize();
  }

  int ground() const { return ground_; }
  int k() const { return k_; }
  std::size_t size() const { return masks_.size(); }
  bool empty() const { return masks_.empty(); }

  const std::vector<Mask>& masks() const { return masks_; }
  KSet operator[](std::size_t i) const { return KSet(masks_[i], ground_); }

  std::vector<KSet> members() const {
    std::vector<KSet> out;
    out.reserve(masks_.size());
    for (Mask m : masks_) out.emplace_back(m, ground_);
    return out;
  }

  bool contains(Mask m) const { return std::binary_search(masks_.begin(), masks_.end(), m); }
  bool contains(const KSet& s) const { return s.ground() == ground_ && contains(s.mask()); }

  /// Union of all members.
  Mask support() const {
    Mask u = 0;
    for (Mask m : masks_) u |= m;
    return u;
  }

  friend bool operator==(const Family& a, const Family& b) {
    return a.ground_ == b.ground_ && a.k_ == b.k_ && a.masks_ == b.masks_;
  }

  std::string to_string() const {
    std::string s = "{";
    for (std::size_t i = 0; i < masks_.size(); ++i) {
      if (i) s += ",";
      s += (*this)[i].to_string();
    }
    return s + "}";
  }

 private:
  void validate_params() const {
    if (ground_ < 1 || ground_ > kMaxGround)
      throw std::invalid_argument("ground size must be in [1, 64], got " + std::to_string(ground_));
    if (k_ < 0 || k_ > ground_) throw std::invalid_argument("uniformity k out of range");
  }

  void normalize() {
    const Mask ground_mask = prefix_mask(ground_);
    for (Mask m : masks_) {
      if ((m & ~ground_mask) != 0) throw std::invalid_argument("member outside ground set");
      if (popcount(m) != k_) throw std::invalid_argument("member has wrong size");
    }
    std::sort(masks_.begin(), masks_.end());
    masks_.erase(std::unique(masks_.begin(), masks_.end()), masks_.end());
  }

  int ground_ = 1;
  int k_ = 0;
  std::vector<Mask> masks_;
};

/// The complete family of all k-subsets of [n].
inline Family complete_family(int n, int k) { return Family(n, k, all_kset_masks(n, k)); }

/// Family compression S_ij: each member moves to its (i,j)-exchange unless the
/// image is already a member, in which case it stays put.
inline Family shift_family(const Family& g, int i, int j) {
  if (i >= j) throw std::invalid_argument("shift_family requires i < j");
  if (i < 1 || j > g.ground()) throw std::invalid_argument("shift_family elements out of range");
  const Mask bi = bit_of(i);
  const Mask bj = bit_of(j);
  std::vector<Mask> out;
  out.reserve(g.size());
  for (Mask m : g.masks()) {
    if ((m & bj) != 0 && (m & bi) == 0) {
      Mask image = (m & ~bj) | bi;
      out.push_back(g.contains(image) ? m : image);
    } else {
      out.push_back(m);
    }
  }
  return Family(g.ground(), g.k(), std::move(out));
}

/// Repeated lexicographic sweeps of S_ij over all i < j until nothing moves.
/// The result is shifted and has the same size; it is not a canonical form.
inline Family fully_shift(const Family& g) {
  Family cur = g;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 1; i <= cur.ground(); ++i) {
      for (int j = i + 1; j <= cur.ground(); ++j) {
        Family next = shift_family(cur, i, j);
        if (!(next == cur)) {
          cur = std::move(next);
          changed = true;
        }
      }
    }
  }
  return cur;
}

/// Down-closed under the shifting order. Checking immediate predecessors suffices.
inline bool is_shifted(const Family& g) {
  for (Mask m : g.masks())
    for (Mask p : immediate_predecessors(m))
      if (!g.contains(p)) return false;
  return true;
}

/// All (k-1)-subsets of members.
inline Family shadow(const Family& g) {
  if (g.k() < 1) throw std::invalid_argument("shadow requires k >= 1");
  std::unordered_set<Mask> seen;
  for (Mask m : g.masks())
    for (Mask rest = m; rest != 0; rest &= rest - 1) seen.insert(m & ~(rest & (~rest + 1)));
  return Family(g.ground(), g.k() - 1, std::vector<Mask>(seen.begin(), seen.end()));
}

/// {F \ X : F in G, F meets X exactly in B}. Labels are kept; the result lives on
/// the same ground and simply never uses elements of X.
inline Family link(const Family& g, const KSet& b, const KSet& x) {
  if ((b.mask() & ~x.mask()) != 0) throw std::invalid_argument("link requires B to be a subset of X");
  if (b.ground() != g.ground() || x.ground() != g.ground())
    throw std::invalid_argument("link ground size mismatch");
  std::vector<Mask> out;
  for (Mask m : g.masks())
    if ((m & x.mask()) == b.mask()) out.push_back(m & ~x.mask());
  return Family(g.ground(), g.k() - b.k(), std::move(out));
}

/// Mask-based overload; B and X may be empty.
inline Family link(const Family& g, Mask b, Mask x) {
  return link(g, KSet(b, g.ground()), KSet(x, g.ground()));
}

/// Compacts the ground by renumbering the elements outside `removed` as 1..n'.
inline Family relabel_without(const Family& g, Mask removed) {
  std::vector<int> new_label(static_cast<std::size_t>(g.ground()) + 1, 0);
  int next = 0;
  for (int e = 1; e <= g.ground(); ++e)
    if ((removed & bit_of(e)) == 0) new_label[static_cast<std::size_t>(e)] = ++next;
  if (next == 0) throw std::invalid_argument("relabel would leave an empty ground set");
  std::vector<Mask> out;
  out.reserve(g.size());
  for (Mask m : g.masks()) {
    if ((m & removed) != 0) throw std::invalid_argument("member uses a removed element");
    Mask r = 0;
    for (int e : mask_elements(m)) r |= bit_of(new_label[static_cast<std::size_t>(e)]);
    out.push_back(r);
  }
  return Family(next, g.k(), std::move(out));
}

}  // namespace ufam
