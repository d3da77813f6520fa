#pragma once

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ufam/catalog.hpp"
#include "ufam/search.hpp"
#include "ufam/serialize.hpp"

#ifndef UFAM_VERSION
#define UFAM_VERSION "0.1.0"
#endif

namespace ufam {

inline constexpr const char* kVersion = UFAM_VERSION;

// ---------------------------------------------------------------------------
// Parameter ranges
// ---------------------------------------------------------------------------

/// Parses "7", "8..14" or comma lists of those ("3,5..7").
inline std::vector<int> parse_range(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad range '" + text + "'");
    }
    if (used != s.size()) throw std::invalid_argument("bad range '" + text + "'");
    return v;
  };
  if (!text.empty() && text.back() == ',') throw std::invalid_argument("bad range '" + text + "'");
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw std::invalid_argument("bad range '" + text + "'");
    auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(to_int(item));
    } else {
      int a = to_int(item.substr(0, dots));
      int b = to_int(item.substr(dots + 2));
      if (b < a) throw std::invalid_argument("empty range '" + item + "'");
      for (int v = a; v <= b; ++v) out.push_back(v);
    }
  }
  if (out.empty()) throw std::invalid_argument("empty range");
  return out;
}

/// A requested quad that may or may not be valid.
struct QuadRequest {
  int n, k, s, q;
  std::optional<ParamQuad> quad;
  std::string error;
};

/// Cartesian product of the ranges, in (k, s, q, n) nesting order with n fastest.
inline std::vector<QuadRequest> expand_quads(const std::vector<int>& ns, const std::vector<int>& ks,
                                             const std::vector<int>& ss, const std::vector<int>& qs) {
  std::vector<QuadRequest> out;
  for (int k : ks)
    for (int s : ss)
      for (int q : qs)
        for (int n : ns) {
          QuadRequest req{n, k, s, q, std::nullopt, {}};
          if (!decompose_q(k, s, q)) {
            req.error = "no decomposition";
          } else {
            try {
              req.quad = ParamQuad::make(n, k, s, q);
            } catch (const std::invalid_argument& e) {
              req.error = e.what();
            }
          }
          out.push_back(std::move(req));
        }
  return out;
}

// ---------------------------------------------------------------------------
// Result cache
// ---------------------------------------------------------------------------

struct SearchSummary {
  Count value = 0;
  SearchStatus status = SearchStatus::ProvedOptimal;
  std::uint64_t nodes = 0;
  double elapsed_ms = 0;
  std::vector<Mask> witness;
};

struct CacheEntry {
  std::string version = kVersion;
  std::optional<BoundRecord> exact;
  std::optional<BoundRecord> lower;
  std::optional<BoundRecord> upper;
  std::optional<SearchSummary> search;

  friend bool operator==(const CacheEntry& a, const CacheEntry& b) {
    auto same = [](const std::optional<BoundRecord>& x, const std::optional<BoundRecord>& y) {
      if (x.has_value() != y.has_value()) return false;
      return !x || (x->value == y->value && x->kind == y->kind && x->provenance == y->provenance);
    };
    auto same_search = [](const std::optional<SearchSummary>& x, const std::optional<SearchSummary>& y) {
      if (x.has_value() != y.has_value()) return false;
      return !x || (x->value == y->value && x->status == y->status && x->witness == y->witness);
    };
    return a.version == b.version && same(a.exact, b.exact) && same(a.lower, b.lower) && same(a.upper, b.upper) &&
           same_search(a.search, b.search);
  }
};

/// Best known results per quad, persisted as JSON. Merging never degrades an entry:
/// exact values stay, lower bounds only rise, upper bounds only fall.
class ResultCache {
 public:
  using Key = std::tuple<int, int, int, int>;
  using Warn = std::function<void(const std::string&)>;

  static ResultCache load(const std::string& path) {
    ResultCache c;
    std::ifstream in(path);
    if (!in) return c;
    json j = json::parse(in);
    for (const auto& e : j.at("entries")) {
      ParamQuad pq = ParamQuad::make(e.at("n"), e.at("k"), e.at("s"), e.at("q"));
      CacheEntry entry;
      entry.version = e.value("version", std::string("unknown"));
      if (e.contains("exact")) entry.exact = bound_record_from_json(e["exact"]);
      if (e.contains("lower")) entry.lower = bound_record_from_json(e["lower"]);
      if (e.contains("upper")) entry.upper = bound_record_from_json(e["upper"]);
      if (e.contains("search")) {
        const auto& sj = e["search"];
        SearchSummary s;
        s.value = sj.at("value").get<Count>();
        s.status = search_status_from_string(sj.at("status"));
        s.nodes = sj.value("nodes", std::uint64_t{0});
        s.elapsed_ms = sj.value("elapsed_ms", 0.0);
        s.witness = masks_from_json(sj.at("witness"), pq.n);
        entry.search = std::move(s);
      }
      c.entries_[pq.key()] = std::move(entry);
    }
    return c;
  }

  void save(const std::string& path) const {
    json entries = json::array();
    for (const auto& [key, e] : entries_) {
      auto [n, k, s, q] = key;
      json j{{"n", n}, {"k", k}, {"s", s}, {"q", q}, {"version", e.version}};
      if (e.exact) j["exact"] = to_json(*e.exact);
      if (e.lower) j["lower"] = to_json(*e.lower);
      if (e.upper) j["upper"] = to_json(*e.upper);
      if (e.search)
        j["search"] = json{{"value", e.search->value},
                           {"status", to_string(e.search->status)},
                           {"nodes", e.search->nodes},
                           {"elapsed_ms", e.search->elapsed_ms},
                           {"witness", masks_to_json(e.search->witness)}};
      entries.push_back(std::move(j));
    }
    json root{{"version", kVersion}, {"entries", entries}};
    auto tmp = path + ".tmp";
    {
      std::ofstream out(tmp);
      if (!out) throw std::runtime_error("cannot write " + tmp);
      out << root.dump(1) << "\n";
    }
    std::filesystem::rename(tmp, path);
  }

  /// Entry for `pq` if it was produced by this version. Entries from other versions
  /// trigger `warn` and are not returned.
  std::optional<CacheEntry> lookup(const ParamQuad& pq, const Warn& warn = {}) const {
    auto it = entries_.find(pq.key());
    if (it == entries_.end()) return std::nullopt;
    if (it->second.version != kVersion) {
      if (warn)
        warn("cache entry " + pq.to_string() + " was written by version " + it->second.version +
             "; recomputing instead of reusing it");
      return std::nullopt;
    }
    return it->second;
  }

  void merge(const BoundRecord& rec) {
    CacheEntry& e = fresh_entry(rec.quad);
    switch (rec.kind) {
      case BoundKind::Exact:
        if (e.exact && e.exact->value != rec.value)
          throw LedgerInconsistency("cache holds exact " + std::to_string(e.exact->value) + " for " +
                                    rec.quad.to_string() + " but " + to_string(rec.provenance) + " gives " +
                                    std::to_string(rec.value));
        if (!e.exact) e.exact = rec;
        break;
      case BoundKind::Lower:
        if (!e.lower || rec.value > e.lower->value) e.lower = rec;
        break;
      case BoundKind::Upper:
        if (!e.upper || rec.value < e.upper->value) e.upper = rec;
        break;
    }
    check(rec.quad, e);
  }

  void merge(const ParamQuad& pq, const SearchOutcome& out) {
    CacheEntry& e = fresh_entry(pq);
    SearchSummary s{out.value, out.status, out.nodes, out.elapsed_ms, out.witness.masks()};
    const bool proved = out.status == SearchStatus::ProvedOptimal;
    const bool had_proof = e.search && e.search->status == SearchStatus::ProvedOptimal;
    if (!e.search || (proved && !had_proof) || (!had_proof && !proved && s.value > e.search->value))
      e.search = std::move(s);
    BoundRecord rec{pq, out.value, proved ? BoundKind::Exact : BoundKind::Lower, Provenance::Search,
                    proved ? "exhaustive shifted search" : "best family found before the budget ran out",
                    std::nullopt};
    merge(rec);
  }

  std::size_t size() const { return entries_.size(); }
  const std::map<Key, CacheEntry>& entries() const { return entries_; }

 private:
  // Entries from other versions are replaced rather than merged into.
  CacheEntry& fresh_entry(const ParamQuad& pq) {
    auto& e = entries_[pq.key()];
    if (e.version != kVersion) e = CacheEntry{};
    return e;
  }

  static void check(const ParamQuad& pq, const CacheEntry& e) {
    auto fail = [&](const BoundRecord& a, const BoundRecord& b) {
      throw LedgerInconsistency("cache entry " + pq.to_string() + ": " + to_string(a.provenance) + " " +
                                std::to_string(a.value) + " conflicts with " + to_string(b.provenance) + " " +
                                std::to_string(b.value));
    };
    if (e.lower && e.upper && e.lower->value > e.upper->value) fail(*e.lower, *e.upper);
    if (e.exact && e.lower && e.lower->value > e.exact->value) fail(*e.lower, *e.exact);
    if (e.exact && e.upper && e.upper->value < e.exact->value) fail(*e.exact, *e.upper);
  }

  std::map<Key, CacheEntry> entries_;
};

/// Exclusive advisory lock on `<path>.lock` for the lifetime of the object.
class CacheLock {
 public:
  explicit CacheLock(const std::string& path) : lock_path_(path + ".lock") {
    fd_ = ::open(lock_path_.c_str(), O_CREAT | O_RDWR, 0644);
    if (fd_ < 0) throw std::runtime_error("cannot open lock file " + lock_path_);
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      throw std::runtime_error("cache " + path + " is locked by another campaign");
    }
  }
  CacheLock(const CacheLock&) = delete;
  CacheLock& operator=(const CacheLock&) = delete;
  ~CacheLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }

 private:
  std::string lock_path_;
  int fd_ = -1;
};

// ---------------------------------------------------------------------------
// Rows
// ---------------------------------------------------------------------------

/// All bound records for `pq`, checked against each other, summarized by the exact
/// value when one is known and by the construction otherwise.
inline ResultRow bounds_row(const ParamQuad& pq, const BoundLedger* known = nullptr) {
  ResultRow row;
  row.quad = pq;
  row.records = all_bounds(pq, known);
  BoundLedger ledger;
  ledger.add_all(row.records);
  if (known)
    for (const auto& r : known->records(pq)) ledger.add(r);
  const BoundRecord* summary = &row.records.front();
  for (const auto& r : row.records)
    if (r.kind == BoundKind::Exact) {
      summary = &r;
      break;
    }
  row.value = summary->value;
  row.kind = summary->kind;
  row.provenance = summary->provenance;
  row.citation = summary->citation;
  row.status = "formula";
  return row;
}

inline ResultRow search_row(const ParamQuad& pq, const SearchOutcome& out) {
  ResultRow row;
  row.quad = pq;
  row.value = out.value;
  row.kind = out.status == SearchStatus::ProvedOptimal ? BoundKind::Exact : BoundKind::Lower;
  row.provenance = Provenance::Search;
  row.citation = out.status == SearchStatus::ProvedOptimal ? "exhaustive shifted search"
                                                           : "best family found before the budget ran out";
  row.status = to_string(out.status);
  row.nodes = out.nodes;
  row.elapsed_ms = out.elapsed_ms;
  row.records.push_back({pq, out.value, row.kind, Provenance::Search, row.citation, std::nullopt});
  return row;
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

enum class Verdict { Confirmed, Refuted, Open };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Confirmed: return "CONFIRMED";
    case Verdict::Refuted: return "REFUTED";
    case Verdict::Open: return "OPEN";
  }
  return "?";
}

struct VerifyResult {
  ParamQuad quad;
  Count predicted = 0;
  SearchOutcome outcome;
  Verdict verdict = Verdict::Open;
};

/// Compares the exact optimum with the predicted value (the best construction,
/// shifted by `prediction_delta` for harness self-tests).
inline VerifyResult verify_quad(const ParamQuad& pq, const SearchBudget& budget, Count prediction_delta = 0,
                                int threads = 1) {
  VerifyResult res;
  res.quad = pq;
  res.predicted = conjecture_value(pq).value + prediction_delta;
  SearchOptions opts;
  opts.threads = threads;
  // A shifted prediction must not seed the search, or the seed would hide the gap.
  opts.seed_with_construction = prediction_delta == 0;
  res.outcome = exact_m_shifted(pq, budget, opts);
  if (res.outcome.status != SearchStatus::ProvedOptimal)
    res.verdict = res.outcome.value > res.predicted ? Verdict::Refuted : Verdict::Open;
  else
    res.verdict = res.outcome.value == res.predicted ? Verdict::Confirmed : Verdict::Refuted;
  return res;
}

}  // namespace ufam
