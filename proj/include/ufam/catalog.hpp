#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "ufam/binomial.hpp"
#include "ufam/family.hpp"

namespace ufam {

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

/// q = (k - r) s + p with 1 <= r <= k and r <= p <= s + r - 2.
struct Decomposition {
  int p = 0;
  int r = 0;
  friend bool operator==(const Decomposition&, const Decomposition&) = default;
};

/// Unique decomposition of q for k <= q <= sk - 1; nullopt outside that range.
inline std::optional<Decomposition> decompose_q(int k, int s, int q) {
  if (k < 1 || s < 2) return std::nullopt;
  if (q < k || q > s * k - 1) return std::nullopt;
  for (int r = 1; r <= k; ++r) {
    int p = q - (k - r) * s;
    if (p >= r && p <= s + r - 2) return Decomposition{p, r};
  }
  return std::nullopt;
}

/// A problem instance (n, k, s, q) with its decomposition.
struct ParamQuad {
  int n = 0;
  int k = 0;
  int s = 0;
  int q = 0;
  int p = 0;
  int r = 0;

  static ParamQuad make(int n, int k, int s, int q) {
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    if (s < 2) throw std::invalid_argument("s must be at least 2");
    if (q < k) throw std::invalid_argument("q must be at least k");
    if (q >= s * k) throw std::invalid_argument("q must be below s*k");
    if (n <= q) throw std::invalid_argument("n must exceed q");
    if (n > kMaxGround) throw std::invalid_argument("n exceeds the 64-element mask width");
    auto d = decompose_q(k, s, q);
    if (!d) throw std::invalid_argument("no decomposition");  // unreachable for valid q
    return ParamQuad{n, k, s, q, d->p, d->r};
  }

  std::tuple<int, int, int, int> key() const { return {n, k, s, q}; }
  std::string to_string() const {
    return "(n=" + std::to_string(n) + ",k=" + std::to_string(k) + ",s=" + std::to_string(s) +
           ",q=" + std::to_string(q) + ")";
  }
  friend bool operator==(const ParamQuad&, const ParamQuad&) = default;
};

// ---------------------------------------------------------------------------
// Constructions A(p, r, n, k)
// ---------------------------------------------------------------------------

inline void check_a_params(int p, int r, int n, int k) {
  if (n < 1 || n > kMaxGround) throw std::invalid_argument("A(p,r): n out of range");
  if (k < 1 || k > n) throw std::invalid_argument("A(p,r): k out of range");
  if (r < 0 || r > p || p > n || r > k)
    throw std::invalid_argument("A(p,r): need 0 <= r <= p <= n and r <= k");
}

/// Membership in A(p, r): at least r elements inside [p].
inline bool in_a_family(Mask m, int p, int r) { return popcount(m & prefix_mask(p)) >= r; }

/// All k-subsets of [n] meeting [p] in at least r elements.
inline Family a_family(int p, int r, int n, int k) {
  check_a_params(p, r, n, k);
  std::vector<Mask> out;
  for (Mask m : all_kset_masks(n, k))
    if (in_a_family(m, p, r)) out.push_back(m);
  return Family(n, k, std::move(out));
}

/// |A(p, r, n, k)| = sum_{i=r..k} C(p, i) C(n-p, k-i).
inline Count a_size(int p, int r, int n, int k) {
  check_a_params(p, r, n, k);
  Count total = 0;
  for (int i = r; i <= k; ++i) total += binom(p, i) * binom(n - p, k - i);
  return total;
}

/// A member of the candidate list A(p + i s, r + i), i = 0..k-r.
struct Candidate {
  int i = 0;
  int p = 0;
  int r = 0;
  Count size = 0;
};

inline std::vector<Candidate> conjecture_candidates(const ParamQuad& pq) {
  std::vector<Candidate> out;
  for (int i = 0; i <= pq.k - pq.r; ++i) {
    int p = pq.p + i * pq.s;
    int r = pq.r + i;
    out.push_back({i, p, r, a_size(p, r, pq.n, pq.k)});
  }
  return out;
}

/// True iff m lies in the union of the candidate families; every shifted U(s,q)
/// family is contained in this union.
inline bool in_candidate_union(Mask m, const ParamQuad& pq) {
  for (int i = 0; i <= pq.k - pq.r; ++i)
    if (in_a_family(m, pq.p + i * pq.s, pq.r + i)) return true;
  return false;
}

/// Same test from a bare decomposition, for families whose ground may not exceed q.
inline bool in_candidate_union(Mask m, int k, int s, const Decomposition& d) {
  for (int i = 0; i <= k - d.r; ++i)
    if (in_a_family(m, d.p + i * s, d.r + i)) return true;
  return false;
}

/// The union of the candidate families in colex order. It is a down-set.
inline std::vector<Mask> candidate_universe(const ParamQuad& pq) {
  std::vector<Mask> out;
  for (Mask m : all_kset_masks(pq.n, pq.k))
    if (in_candidate_union(m, pq)) out.push_back(m);
  return out;
}

// ---------------------------------------------------------------------------
// Bound records
// ---------------------------------------------------------------------------

enum class BoundKind { Lower, Upper, Exact };

enum class Provenance {
  Construction,
  SmallQClaim,
  TheoremK2,
  TheoremTwoCandidates,
  TheoremUnionThreshold,
  TheoremStarUnion,
  TheoremK3F3,
  TheoremK3F2,
  TheoremK3S3Q7,
  HierarchyLift,
  ShiftedUnionSum,
  Search,
};

inline const char* to_string(BoundKind k) {
  switch (k) {
    case BoundKind::Lower: return "lower";
    case BoundKind::Upper: return "upper";
    case BoundKind::Exact: return "exact";
  }
  return "?";
}

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::Construction: return "construction";
    case Provenance::SmallQClaim: return "small-q-claim";
    case Provenance::TheoremK2: return "k2-theorem";
    case Provenance::TheoremTwoCandidates: return "two-candidate-theorem";
    case Provenance::TheoremUnionThreshold: return "union-threshold-theorem";
    case Provenance::TheoremStarUnion: return "star-union-theorem";
    case Provenance::TheoremK3F3: return "k3-f3-theorem";
    case Provenance::TheoremK3F2: return "k3-f2-theorem";
    case Provenance::TheoremK3S3Q7: return "k3-s3-q7-theorem";
    case Provenance::HierarchyLift: return "hierarchy-lift";
    case Provenance::ShiftedUnionSum: return "shifted-union-sum";
    case Provenance::Search: return "search";
  }
  return "?";
}

inline BoundKind bound_kind_from_string(const std::string& s) {
  if (s == "lower") return BoundKind::Lower;
  if (s == "upper") return BoundKind::Upper;
  if (s == "exact") return BoundKind::Exact;
  throw std::invalid_argument("unknown bound kind '" + s + "'");
}

inline Provenance provenance_from_string(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(Provenance::Search); ++i) {
    auto p = static_cast<Provenance>(i);
    if (s == to_string(p)) return p;
  }
  throw std::invalid_argument("unknown provenance '" + s + "'");
}

struct BoundRecord {
  ParamQuad quad;
  Count value = 0;
  BoundKind kind = BoundKind::Lower;
  Provenance provenance = Provenance::Construction;
  std::string citation;
  std::optional<int> argmax;  // construction index i, when applicable
};

/// Largest candidate A(p + i s, r + i). Each candidate has property U(s,q), so this
/// is a lower bound on m(n,k,s,q). Ties report the smallest i.
inline BoundRecord conjecture_value(const ParamQuad& pq) {
  auto cands = conjecture_candidates(pq);
  auto best = std::max_element(cands.begin(), cands.end(),
                               [](const Candidate& a, const Candidate& b) { return a.size < b.size; });
  return {pq,
          best->size,
          BoundKind::Lower,
          Provenance::Construction,
          "A(" + std::to_string(best->p) + "," + std::to_string(best->r) + ") has U(s,q); max over A(p+is,r+i)",
          best->i};
}

/// Shifted U(s,q) families lie inside the union of the candidates.
inline BoundRecord shifted_union_upper(const ParamQuad& pq) {
  Count total = 0;
  for (const auto& c : conjecture_candidates(pq)) total += c.size;
  return {pq, total, BoundKind::Upper, Provenance::ShiftedUnionSum,
          "shifted U(s,q) families lie in the union of A(p+is,r+i), i=0..k-r", std::nullopt};
}

/// f(s,p,r) = s(s+1) * sum_{j<r} s^{r-1-j} C(p,j) / C(p,r), exactly.
inline Rational f_threshold(int s, int p, int r) {
  if (r < 1 || r > p) throw std::invalid_argument("f_threshold requires 1 <= r <= p");
  if (s < 1) throw std::invalid_argument("f_threshold requires s >= 1");
  Int128 sum = 0;
  for (int j = 0; j <= r - 1; ++j) {
    Int128 power = 1;
    for (int e = 0; e < r - 1 - j; ++e) power = checked_mul(power, s);
    sum = checked_add(sum, checked_mul(power, binom(p, j)));
  }
  return Rational(checked_mul(checked_mul(s, s + 1), sum), binom(p, r));
}

/// n >= p + 1 + (s + f(s,p,r))(k - r), compared exactly.
inline bool union_threshold_met(int n, int k, int s, int p, int r) {
  Rational rhs = Rational(p + 1) + (Rational(s) + f_threshold(s, p, r)) * Rational(k - r);
  return Rational(n) >= rhs;
}

/// For U(s+1, (k-r)(s+1)+p) with r <= p <= s+r-1: past the threshold every family
/// has at most |A(p,r)| members, and A(p,r) attains it.
inline std::optional<BoundRecord> thmsunion_bound(int n, int k, int s, int p, int r) {
  if (s < 1) throw std::invalid_argument("union threshold bound requires s >= 1");
  if (r < 1 || r > k || p < r || p > s + r - 1)
    throw std::invalid_argument("union threshold bound requires 1 <= r <= k, r <= p <= s+r-1");
  if (!union_threshold_met(n, k, s, p, r)) return std::nullopt;
  const int q = (k - r) * (s + 1) + p;
  ParamQuad pq;
  try {
    pq = ParamQuad::make(n, k, s + 1, q);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
  return BoundRecord{pq, a_size(p, r, n, k), BoundKind::Exact, Provenance::TheoremUnionThreshold,
                     "n >= p+1+(s+f(s,p,r))(k-r) implies m = |A(p,r)| for U(s+1,(k-r)(s+1)+p)", std::nullopt};
}

/// Star form: U(s+1, k + s(k-1)) and n > s(s+2)k imply at most C(n-1, k-1).
inline std::optional<BoundRecord> thm1ekr_bound(int n, int k, int s) {
  if (s < 1 || k < 1) throw std::invalid_argument("star union bound requires s, k >= 1");
  if (static_cast<long long>(n) <= static_cast<long long>(s) * (s + 2) * k) return std::nullopt;
  ParamQuad pq;
  try {
    pq = ParamQuad::make(n, k, s + 1, k + s * (k - 1));
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
  return BoundRecord{pq, binom(n - 1, k - 1), BoundKind::Exact, Provenance::TheoremStarUnion,
                     "n > s(s+2)k and U(s+1, k+s(k-1)) imply at most C(n-1,k-1)", std::nullopt};
}

// ---------------------------------------------------------------------------
// Ledger
// ---------------------------------------------------------------------------

class LedgerInconsistency : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Bound records grouped by quad. Adding a record that contradicts an existing one
/// (lower above upper, or two different exact values) throws.
class BoundLedger {
 public:
  using Key = std::tuple<int, int, int, int>;

  void add(const BoundRecord& rec) {
    auto& list = records_[rec.quad.key()];
    for (const auto& other : list) check_pair(other, rec);
    list.push_back(rec);
  }

  void add_all(const std::vector<BoundRecord>& recs) {
    for (const auto& r : recs) add(r);
  }

  const std::vector<BoundRecord>& records(const ParamQuad& pq) const {
    static const std::vector<BoundRecord> kEmpty;
    auto it = records_.find(pq.key());
    return it == records_.end() ? kEmpty : it->second;
  }

  std::optional<Count> exact(const ParamQuad& pq) const {
    for (const auto& r : records(pq))
      if (r.kind == BoundKind::Exact) return r.value;
    return std::nullopt;
  }

  std::optional<Count> best_lower(const ParamQuad& pq) const {
    std::optional<Count> out;
    for (const auto& r : records(pq))
      if (r.kind != BoundKind::Upper) out = std::max(out.value_or(r.value), r.value);
    return out;
  }

  std::optional<Count> best_upper(const ParamQuad& pq) const {
    std::optional<Count> out;
    for (const auto& r : records(pq))
      if (r.kind != BoundKind::Lower) out = std::min(out.value_or(r.value), r.value);
    return out;
  }

  const std::map<Key, std::vector<BoundRecord>>& all() const { return records_; }

 private:
  static Count lo(const BoundRecord& r) { return r.kind == BoundKind::Upper ? -1 : r.value; }
  static Count hi(const BoundRecord& r) {
    return r.kind == BoundKind::Lower ? std::numeric_limits<Count>::max() : r.value;
  }

  static void check_pair(const BoundRecord& a, const BoundRecord& b) {
    if (lo(a) > hi(b) || lo(b) > hi(a))
      throw LedgerInconsistency("inconsistent bounds for " + a.quad.to_string() + ": " + to_string(a.provenance) +
                                " gives " + to_string(a.kind) + " " + std::to_string(a.value) + ", " +
                                to_string(b.provenance) + " gives " + to_string(b.kind) + " " +
                                std::to_string(b.value));
  }

  std::map<Key, std::vector<BoundRecord>> records_;
};

// ---------------------------------------------------------------------------
// Theorem dispatcher
// ---------------------------------------------------------------------------

/// The three k = 3 candidates for q = 2s + t: A(t,1), A(s+t,2), A(2s+t,3).
inline std::array<Count, 3> k3_family_sizes(int n, int s, int t) {
  return {a_size(t, 1, n, 3), a_size(s + t, 2, n, 3), a_size(2 * s + t, 3, n, 3)};
}

/// Every closed-form result that applies to `pq`. `known` may supply exact values
/// for other quads (e.g. from search) that the hierarchy lift can build on.
inline std::vector<BoundRecord> special_case_bounds(const ParamQuad& pq, const BoundLedger* known = nullptr) {
  std::vector<BoundRecord> out;
  const int n = pq.n, k = pq.k, s = pq.s, q = pq.q;

  if (q <= k + s - 2)
    out.push_back({pq, binom(q, k), BoundKind::Exact, Provenance::SmallQClaim,
                   "k <= q <= k+s-2 implies m = C(q,k)", std::nullopt});

  if (k == 2 && q > s && q < 2 * s) {
    const int r = q - s;
    Count v = std::max(a_size(r, 1, n, 2), a_size(s + r, 2, n, 2));
    out.push_back({pq, v, BoundKind::Exact, Provenance::TheoremK2,
                   "k=2, U(s,s+r): m = max{|A(r,1)|, |A(s+r,2)|}", std::nullopt});
  }

  if (k >= 2) {
    const int t = q - s - k + 3;
    if (t >= 2 && t <= s) {
      Count v = std::max(a_size(s + t + k - 3, k, n, k), a_size(t + k - 3, k - 1, n, k));
      out.push_back({pq, v, BoundKind::Exact, Provenance::TheoremTwoCandidates,
                     "U(s,s+t+k-3), 2<=t<=s: m = max{|A(s+t+k-3,k)|, |A(t+k-3,k-1)|}", std::nullopt});
    }
  }

  if (auto rec = thmsunion_bound(n, k, s - 1, pq.p, pq.r)) out.push_back(*rec);

  if (q == k + (s - 1) * (k - 1))
    if (auto rec = thm1ekr_bound(n, k, s - 1)) out.push_back(*rec);

  if (k == 3 && q == 2 * s + 1 && n <= 3 * s && s >= 10)
    out.push_back({pq, binom(2 * s + 1, 3), BoundKind::Exact, Provenance::TheoremK3F3,
                   "k=3, U(s,2s+1), n<=3s, s>=10: m = C(2s+1,3)", std::nullopt});

  if (k == 3) {
    const int t = q - 2 * s;
    if (t >= 1 && t < s && 5 * (s + t) <= n &&
        static_cast<long long>(3) * t * n <= static_cast<long long>(s + t) * (s + t))
      out.push_back({pq, a_size(s + t, 2, n, 3), BoundKind::Exact, Provenance::TheoremK3F2,
                     "k=3, U(s,2s+t), 5(s+t) <= n <= (s+t)^2/(3t): m = |A(s+t,2)|", std::nullopt});
  }

  if (k == 3 && s == 3 && q == 7) {
    auto sizes = k3_family_sizes(n, 3, 1);
    out.push_back({pq, *std::max_element(sizes.begin(), sizes.end()), BoundKind::Exact,
                   Provenance::TheoremK3S3Q7, "k=3, U(3,7): m = max{|A(1,1)|, |A(4,2)|, |A(7,3)|}", std::nullopt});
  }

  // Lift from (n-1, k, s, (k-1)s+p) with value C(n-1,k) - C(n-1-p,k).
  const int p = q - (k - 1) * s - 1;
  if (k >= 2 && p >= 1 && p < s && q - 1 >= k) {
    ParamQuad prev;
    bool valid = true;
    try {
      prev = ParamQuad::make(n - 1, k, s, q - 1);
    } catch (const std::invalid_argument&) {
      valid = false;
    }
    if (valid) {
      const Count premise = binom(n - 1, k) - binom(n - 1 - p, k);
      bool established = known != nullptr && known->exact(prev) == premise;
      if (!established)
        for (const auto& r : special_case_bounds(prev, known))
          if (r.kind == BoundKind::Exact && r.value == premise) established = true;
      if (established)
        out.push_back({pq, binom(n, k) - binom(n - 1 - p, k), BoundKind::Exact, Provenance::HierarchyLift,
                       "m(n-1,k,s,(k-1)s+p) = C(n-1,k)-C(n-1-p,k) lifts to m(n,k,s,(k-1)s+p+1)", std::nullopt});
    }
  }
  return out;
}

/// Construction lower bound, shifted-union upper bound and every theorem record.
inline std::vector<BoundRecord> all_bounds(const ParamQuad& pq, const BoundLedger* known = nullptr) {
  std::vector<BoundRecord> out{conjecture_value(pq), shifted_union_upper(pq)};
  auto extra = special_case_bounds(pq, known);
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

// ---------------------------------------------------------------------------
// k = 3 crossovers
// ---------------------------------------------------------------------------

struct K3Crossovers {
  int n = 0, s = 0, t = 0;
  std::array<Count, 3> sizes{};           // |F1|, |F2|, |F3|
  std::array<Count, 4> formula_diffs{};   // |F1\F2|, |F2\F1|, |F2\F3|, |F3\F2|
  std::array<Count, 4> explicit_diffs{};  // same, by construction
  int largest = 0;                        // 1-based index of the largest family (first on ties)
  std::optional<bool> f3_ge_f2_inequality;  // 3(s+1)(n-3s) <= (s-1)(s-2), t = 1 only

  bool formulas_agree() const { return formula_diffs == explicit_diffs; }
};

inline Count difference_size(const Family& a, const Family& b) {
  Count c = 0;
  for (Mask m : a.masks())
    if (!b.contains(m)) ++c;
  return c;
}

/// Sizes and pairwise differences of F1 = A(t,1), F2 = A(s+t,2), F3 = A(2s+t,3),
/// by closed form and by explicit construction.
inline K3Crossovers k3_crossovers(int n, int s, int t) {
  if (t < 1 || s <= t) throw std::invalid_argument("k3_crossovers requires s > t >= 1");
  if (n < 2 * s + t || n > kMaxGround)
    throw std::invalid_argument("k3_crossovers: n too small to host A(2s+t,3)");
  K3Crossovers r;
  r.n = n;
  r.s = s;
  r.t = t;
  r.sizes = k3_family_sizes(n, s, t);
  r.formula_diffs = {
      static_cast<Count>(t) * binom(n - s - t, 2),
      binom(s, 2) * (n - s - t) + binom(s, 3),
      binom(s + t, 2) * (n - 2 * s - t),
      binom(s, 3) + binom(s, 2) * (s + t),
  };
  Family f1 = a_family(t, 1, n, 3);
  Family f2 = a_family(s + t, 2, n, 3);
  Family f3 = a_family(2 * s + t, 3, n, 3);
  r.explicit_diffs = {difference_size(f1, f2), difference_size(f2, f1), difference_size(f2, f3),
                      difference_size(f3, f2)};
  r.largest = static_cast<int>(std::max_element(r.sizes.begin(), r.sizes.end()) - r.sizes.begin()) + 1;
  if (t == 1)
    r.f3_ge_f2_inequality = static_cast<long long>(3) * (s + 1) * (n - 3 * s) <= static_cast<long long>(s - 1) * (s - 2);
  return r;
}

/// Numeric comparison of A(s+p,2) against A(p,1) next to the n < s^2 k / (4p) heuristic.
struct SharpnessComparison {
  Count two_level = 0;  // |A(s+p,2)|
  Count one_level = 0;  // |A(p,1)|
  bool below_quarter_threshold = false;
  bool two_level_larger() const { return two_level > one_level; }
};

inline SharpnessComparison sharpness_comparison(int n, int k, int s, int p) {
  SharpnessComparison c;
  c.two_level = a_size(s + p, 2, n, k);
  c.one_level = a_size(p, 1, n, k);
  c.below_quarter_threshold = static_cast<long long>(4) * n * p < static_cast<long long>(s) * s * k;
  return c;
}

}  // namespace ufam
