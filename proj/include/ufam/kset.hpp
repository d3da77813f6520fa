#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ufam {

/// Largest ground set the bitmask representation can hold.
inline constexpr int kMaxGround = 64;

using Mask = std::uint64_t;

inline constexpr Mask bit_of(int element) { return Mask{1} << (element - 1); }

/// Mask of [1..n].
inline constexpr Mask prefix_mask(int n) {
  return n >= 64 ? ~Mask{0} : (Mask{1} << n) - 1;
}

inline int popcount(Mask m) { return std::popcount(m); }

/// Ascending element list of a mask (1-based).
inline std::vector<int> mask_elements(Mask m) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(std::popcount(m)));
  while (m != 0) {
    out.push_back(std::countr_zero(m) + 1);
    m &= m - 1;
  }
  return out;
}

/// A k-element subset of [ground], stored as a bitmask. Bit e-1 holds element e.
class KSet {
 public:
  KSet() = default;

  /// Unchecked construction from a raw mask; use make_set for validated input.
  KSet(Mask mask, int ground) : mask_(mask), ground_(static_cast<std::uint8_t>(ground)) {}

  Mask mask() const { return mask_; }
  int ground() const { return ground_; }
  int k() const { return std::popcount(mask_); }
  bool contains(int element) const {
    return element >= 1 && element <= ground_ && (mask_ & bit_of(element)) != 0;
  }

  /// Sorted elements a_1 < ... < a_k.
  std::vector<int> elements() const { return mask_elements(mask_); }

  int min_element() const { return mask_ == 0 ? 0 : std::countr_zero(mask_) + 1; }
  int max_element() const { return mask_ == 0 ? 0 : 64 - std::countl_zero(mask_); }

  std::string to_string() const {
    std::string s = "{";
    bool first = true;
    for (int e : elements()) {
      if (!first) s += ",";
      s += std::to_string(e);
      first = false;
    }
    return s + "}";
  }

  friend bool operator==(const KSet& a, const KSet& b) = default;

 private:
  Mask mask_ = 0;
  std::uint8_t ground_ = 0;
};

/// Colex order: for masks with bit e-1 = element e this is plain integer order.
inline bool colex_less(const KSet& a, const KSet& b) { return a.mask() < b.mask(); }

inline KSet make_set(std::span<const int> elements, int n) {
  if (n < 1 || n > kMaxGround)
    throw std::invalid_argument("ground size must be in [1, 64], got " + std::to_string(n));
  if (elements.empty()) throw std::invalid_argument("empty set");
  Mask m = 0;
  int prev = 0;
  for (int e : elements) {
    if (e < 1 || e > n)
      throw std::invalid_argument("element " + std::to_string(e) + " outside [1, " +
                                  std::to_string(n) + "]");
    if (e == prev) throw std::invalid_argument("duplicate element " + std::to_string(e));
    if (e < prev) throw std::invalid_argument("elements not ascending");
    m |= bit_of(e);
    prev = e;
  }
  return KSet(m, n);
}

inline KSet make_set(std::initializer_list<int> elements, int n) {
  return make_set(std::span<const int>(elements.begin(), elements.size()), n);
}

inline void require_compatible(const KSet& a, const KSet& b) {
  if (a.ground() != b.ground()) throw std::invalid_argument("sets have different ground sizes");
  if (a.k() != b.k()) throw std::invalid_argument("sets have different sizes");
}

/// Coordinatewise comparison of the sorted element vectors of G and F.
struct ShiftOrderCertificate {
  KSet lower;
  KSet upper;
  std::vector<int> slack;  // a_j(upper) - a_j(lower)

  bool valid() const {
    return std::all_of(slack.begin(), slack.end(), [](int d) { return d >= 0; });
  }
};

inline ShiftOrderCertificate shift_certificate(const KSet& g, const KSet& f) {
  require_compatible(g, f);
  auto ge = g.elements();
  auto fe = f.elements();
  ShiftOrderCertificate cert{g, f, {}};
  cert.slack.reserve(ge.size());
  for (std::size_t j = 0; j < ge.size(); ++j) cert.slack.push_back(fe[j] - ge[j]);
  return cert;
}

/// G precedes F in the shifting order: a_j(G) <= a_j(F) for every j.
inline bool precedes(const KSet& g, const KSet& f) {
  require_compatible(g, f);
  // Dominance via prefix counts: a_j(G) <= a_j(F) for all j iff every prefix [1..x]
  // holds at least as many elements of G as of F.
  Mask gm = g.mask();
  Mask fm = f.mask();
  for (int x = 1; x <= g.ground(); ++x) {
    Mask pre = prefix_mask(x);
    if (std::popcount(gm & pre) < std::popcount(fm & pre)) return false;
  }
  return true;
}

/// (i,j)-exchange: replaces j by i when j is in F and i is not.
inline KSet shift_pair(const KSet& f, int i, int j) {
  if (i >= j) throw std::invalid_argument("shift_pair requires i < j");
  if (i < 1 || j > f.ground()) throw std::invalid_argument("shift_pair elements out of range");
  if (f.contains(j) && !f.contains(i)) return KSet((f.mask() & ~bit_of(j)) | bit_of(i), f.ground());
  return f;
}

/// Covers from below in the shifting order: one element a_j moved to a_j - 1.
inline std::vector<Mask> immediate_predecessors(Mask m) {
  std::vector<Mask> out;
  for (Mask rest = m; rest != 0; rest &= rest - 1) {
    int b = std::countr_zero(rest);
    if (b > 0 && (m & (Mask{1} << (b - 1))) == 0)
      out.push_back(m ^ (Mask{1} << b) ^ (Mask{1} << (b - 1)));
  }
  return out;
}

/// Covers from above within [1..n]: one element a_j moved to a_j + 1.
inline std::vector<Mask> immediate_successors(Mask m, int n) {
  std::vector<Mask> out;
  for (Mask rest = m; rest != 0; rest &= rest - 1) {
    int b = std::countr_zero(rest);
    if (b + 1 < n && (m & (Mask{1} << (b + 1))) == 0)
      out.push_back(m ^ (Mask{1} << b) ^ (Mask{1} << (b + 1)));
  }
  return out;
}

/// Next mask with the same popcount (Gosper's hack); colex successor.
inline Mask next_same_popcount(Mask m) {
  Mask c = m & (~m + 1);
  Mask r = m + c;
  return (((r ^ m) >> 2) / c) | r;
}

/// All k-subsets of [n] as masks, in colex order.
inline std::vector<Mask> all_kset_masks(int n, int k) {
  if (n < 0 || n > kMaxGround || k < 0 || k > n)
    throw std::invalid_argument("all_kset_masks: bad parameters");
  std::vector<Mask> out;
  if (k == 0) {
    out.push_back(0);
    return out;
  }
  Mask last = prefix_mask(n) & ~prefix_mask(n - k);
  for (Mask m = prefix_mask(k);; m = next_same_popcount(m)) {
    out.push_back(m);
    if (m == last) break;
  }
  return out;
}

}  // namespace ufam
