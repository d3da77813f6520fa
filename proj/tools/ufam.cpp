// ufam: command-line driver for bound tables, exact searches and verification runs.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ufam/campaign.hpp"
#include "ufam/catalog.hpp"
#include "ufam/family_io.hpp"
#include "ufam/properties.hpp"
#include "ufam/search.hpp"
#include "ufam/serialize.hpp"

namespace {

using namespace ufam;

struct RangeFlags {
  std::string n, k, s, q;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--n", n, "ground size: value, A..B or comma list")->required();
    cmd->add_option("--k", k, "uniformity")->required();
    cmd->add_option("--s", s, "number of members in a union")->required();
    cmd->add_option("--q", q, "union size cap")->required();
  }

  std::vector<QuadRequest> expand() const {
    return expand_quads(parse_range(n), parse_range(k), parse_range(s), parse_range(q));
  }
};

struct BudgetFlags {
  std::optional<std::uint64_t> nodes;
  std::optional<double> secs;
  std::optional<Count> target;
  int threads = 1;

  void add_to(CLI::App* cmd, bool with_target = true) {
    cmd->add_option("--budget-nodes", nodes, "stop after this many search nodes");
    cmd->add_option("--budget-secs", secs, "stop after this many seconds");
    if (with_target) cmd->add_option("--target", target, "stop once a family of this size is known");
    cmd->add_option("--threads", threads, "search threads (1 gives reproducible node counts)")
        ->check(CLI::PositiveNumber);
  }

  SearchBudget budget() const { return SearchBudget{nodes, secs, target}; }
};

void report_row_error(const QuadRequest& req) {
  std::cerr << "row n=" << req.n << " k=" << req.k << " s=" << req.s << " q=" << req.q << ": error: " << req.error
            << "\n";
}

void emit(const std::vector<ResultRow>& rows, const std::string& format) {
  std::cout << (format == "json" ? render_json(rows) : render_csv(rows));
}

std::string witness_path(const std::string& dir, const ParamQuad& pq) {
  return (std::filesystem::path(dir) / ("witness-n" + std::to_string(pq.n) + "-k" + std::to_string(pq.k) + "-s" +
                                        std::to_string(pq.s) + "-q" + std::to_string(pq.q) + ".txt"))
      .string();
}

void write_witness(const std::string& path, const Family& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_family(out, f);
}

void warn(const std::string& msg) { std::cerr << "warning: " << msg << "\n"; }

int run_bounds(const RangeFlags& ranges, const std::string& format, const std::string& cache_path, bool use_cache) {
  std::unique_ptr<CacheLock> lock;
  ResultCache cache;
  if (use_cache) {
    lock = std::make_unique<CacheLock>(cache_path);
    cache = ResultCache::load(cache_path);
  }
  std::vector<ResultRow> rows;
  for (const auto& req : ranges.expand()) {
    if (!req.quad) {
      report_row_error(req);
      continue;
    }
    BoundLedger known;
    if (auto e = cache.lookup(*req.quad, warn); e && e->exact) known.add(*e->exact);
    try {
      rows.push_back(bounds_row(*req.quad, &known));
    } catch (const LedgerInconsistency& e) {
      std::cerr << "row " << req.quad->to_string() << ": error: " << e.what() << "\n";
      continue;
    }
    if (use_cache)
      for (const auto& r : rows.back().records) cache.merge(r);
  }
  emit(rows, format);
  if (use_cache) cache.save(cache_path);
  return 0;
}

struct ExactFlags {
  std::string witness_dir = ".";
  std::string checkpoint_path;
  std::string resume_path;
  bool unrestricted = false;
};

int run_exact(const RangeFlags& ranges, const BudgetFlags& bf, const ExactFlags& ef, const std::string& format,
              const std::string& cache_path, bool use_cache) {
  std::unique_ptr<CacheLock> lock;
  ResultCache cache;
  if (use_cache) {
    lock = std::make_unique<CacheLock>(cache_path);
    cache = ResultCache::load(cache_path);
  }
  std::filesystem::create_directories(ef.witness_dir);
  std::vector<ResultRow> rows;
  for (const auto& req : ranges.expand()) {
    if (!req.quad) {
      report_row_error(req);
      continue;
    }
    const ParamQuad& pq = *req.quad;
    auto cached = cache.lookup(pq, warn);
    if (cached && cached->search && cached->search->status == SearchStatus::ProvedOptimal && ef.resume_path.empty()) {
      SearchOutcome out;
      out.value = cached->search->value;
      out.witness = Family(pq.n, pq.k, cached->search->witness);
      out.status = SearchStatus::ProvedOptimal;
      rows.push_back(search_row(pq, out));
      auto path = witness_path(ef.witness_dir, pq);
      write_witness(path, out.witness);
      std::cerr << pq.to_string() << ": served from cache; witness " << path << "\n";
      continue;
    }
    SearchOptions opts;
    opts.threads = bf.threads;
    opts.restrict_universe = !ef.unrestricted;
    if (!ef.resume_path.empty()) opts.resume = load_checkpoint(ef.resume_path);
    SearchOutcome out = exact_m_shifted(pq, bf.budget(), opts);
    rows.push_back(search_row(pq, out));
    auto path = witness_path(ef.witness_dir, pq);
    write_witness(path, out.witness);
    std::cerr << pq.to_string() << ": " << to_string(out.status) << " value " << out.value << "; witness " << path
              << "\n";
    if (out.checkpoint && !ef.checkpoint_path.empty()) {
      save_checkpoint(ef.checkpoint_path, *out.checkpoint);
      std::cerr << pq.to_string() << ": checkpoint written to " << ef.checkpoint_path << "\n";
    }
    if (use_cache) cache.merge(pq, out);
  }
  emit(rows, format);
  if (use_cache) cache.save(cache_path);
  return 0;
}

int run_verify(const RangeFlags& ranges, const BudgetFlags& bf, const std::string& format, Count delta) {
  json out = json::array();
  bool refuted = false;
  if (format != "json") std::cout << "n,k,s,q,predicted,value,status,verdict,nodes,elapsed_ms\n";
  for (const auto& req : ranges.expand()) {
    if (!req.quad) {
      report_row_error(req);
      continue;
    }
    VerifyResult res = verify_quad(*req.quad, bf.budget(), delta, bf.threads);
    refuted = refuted || res.verdict == Verdict::Refuted;
    const auto& pq = res.quad;
    if (format == "json") {
      json row{{"n", pq.n},
               {"k", pq.k},
               {"s", pq.s},
               {"q", pq.q},
               {"predicted", res.predicted},
               {"value", res.outcome.value},
               {"status", to_string(res.outcome.status)},
               {"verdict", to_string(res.verdict)},
               {"nodes", res.outcome.nodes},
               {"elapsed_ms", res.outcome.elapsed_ms}};
      if (res.verdict == Verdict::Refuted) row["witness"] = masks_to_json(res.outcome.witness.masks());
      out.push_back(std::move(row));
    } else {
      std::cout << pq.n << ',' << pq.k << ',' << pq.s << ',' << pq.q << ',' << res.predicted << ','
                << res.outcome.value << ',' << to_string(res.outcome.status) << ',' << to_string(res.verdict) << ','
                << res.outcome.nodes << ',' << res.outcome.elapsed_ms << "\n";
      if (res.verdict == Verdict::Refuted)
        std::cerr << pq.to_string() << ": REFUTED by witness " << res.outcome.witness.to_string() << "\n";
    }
  }
  if (format == "json") std::cout << out.dump(2) << "\n";
  return refuted ? 1 : 0;
}

int run_oracle(const RangeFlags& ranges) {
  bool mismatch = false;
  std::cout << "n,k,s,q,bruteforce,shifted,match\n";
  for (const auto& req : ranges.expand()) {
    if (!req.quad) {
      report_row_error(req);
      continue;
    }
    const auto& pq = *req.quad;
    SearchOutcome brute;
    try {
      brute = exact_m_bruteforce(pq);
    } catch (const std::invalid_argument& e) {
      std::cerr << "row " << pq.to_string() << ": error: " << e.what() << "\n";
      continue;
    }
    SearchOutcome shifted = exact_m_shifted(pq);
    bool match = brute.value == shifted.value;
    mismatch = mismatch || !match;
    std::cout << pq.n << ',' << pq.k << ',' << pq.s << ',' << pq.q << ',' << brute.value << ',' << shifted.value
              << ',' << (match ? "yes" : "NO") << "\n";
  }
  return mismatch ? 1 : 0;
}

int run_ties(const RangeFlags& ranges, const BudgetFlags& bf, const std::string& out_dir, bool show) {
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  std::cout << "n,k,s,q,value,maximizers,status,nodes\n";
  for (const auto& req : ranges.expand()) {
    if (!req.quad) {
      report_row_error(req);
      continue;
    }
    const auto& pq = *req.quad;
    MaximizerList list = enumerate_maximum_families(pq, bf.budget());
    std::cout << pq.n << ',' << pq.k << ',' << pq.s << ',' << pq.q << ',' << list.value << ',' << list.families.size()
              << ',' << to_string(list.status) << ',' << list.nodes << "\n";
    for (std::size_t i = 0; i < list.families.size(); ++i) {
      if (show) std::cerr << pq.to_string() << " maximizer " << i + 1 << ": " << list.families[i].to_string() << "\n";
      if (!out_dir.empty()) {
        auto path = std::filesystem::path(out_dir) /
                    ("max-n" + std::to_string(pq.n) + "-k" + std::to_string(pq.k) + "-s" + std::to_string(pq.s) +
                     "-q" + std::to_string(pq.q) + "-" + std::to_string(i + 1) + ".txt");
        write_witness(path.string(), list.families[i]);
      }
    }
  }
  return 0;
}

int run_check_family(const std::string& path, int s, int q) {
  Family f;
  try {
    f = read_family_file(path);
  } catch (const ParseError& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return 2;
  }
  const int mu = max_union(f, s);
  std::cout << "ground: " << f.ground() << "\n"
            << "k: " << f.k() << "\n"
            << "size: " << f.size() << "\n"
            << "max_union(s=" << s << "): " << mu << "\n"
            << "U(" << s << "," << q << "): " << (mu <= q ? "yes" : "no") << "\n"
            << "matching_number: " << matching_number(f) << "\n"
            << "shifted: " << (is_shifted(f) ? "yes" : "no") << "\n";
  if (auto d = decompose_q(f.k(), s, q)) {
    std::size_t outside = 0;
    for (Mask m : f.masks())
      if (!in_candidate_union(m, f.k(), s, *d)) ++outside;
    std::cout << "decomposition: p=" << d->p << " r=" << d->r << "\n"
              << "inside candidate union: " << (outside == 0 ? "yes" : "no") << " (" << outside
              << " members outside)\n";
  } else {
    std::cout << "decomposition: none\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact workbench for union-bounded uniform families m(n,k,s,q)"};
  app.set_version_flag("--version", std::string(ufam::kVersion));
  app.require_subcommand(1);

  std::string format = "csv";
  std::string cache_path = "./ufam-cache.json";
  bool no_cache = false;
  auto add_output = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };
  auto add_cache = [&](CLI::App* cmd) {
    cmd->add_option("--cache", cache_path, "results cache file");
    cmd->add_flag("--no-cache", no_cache, "neither read nor write the cache");
  };

  RangeFlags ranges;
  BudgetFlags budget;
  ExactFlags exact_flags;

  auto* bounds = app.add_subcommand("bounds", "closed-form bounds and constructions per quad");
  ranges.add_to(bounds);
  add_output(bounds);
  add_cache(bounds);

  auto* exact = app.add_subcommand("exact", "exact search over shifted families");
  ranges.add_to(exact);
  budget.add_to(exact);
  add_output(exact);
  add_cache(exact);
  exact->add_option("--witness-dir", exact_flags.witness_dir, "directory for witness families");
  exact->add_option("--checkpoint", exact_flags.checkpoint_path, "write a resume file when the budget runs out");
  exact->add_option("--resume", exact_flags.resume_path, "resume from a checkpoint file");
  exact->add_flag("--unrestricted", exact_flags.unrestricted, "search all k-sets instead of the candidate union");

  Count delta = 0;
  auto* verify = app.add_subcommand("verify", "compare exact values with the best construction");
  ranges.add_to(verify);
  budget.add_to(verify, false);
  add_output(verify);
  verify->add_option("--prediction-delta", delta, "offset added to the prediction (harness self-test)");

  auto* oracle = app.add_subcommand("oracle", "brute force over all families against the shifted search");
  ranges.add_to(oracle);

  std::string ties_dir;
  bool ties_show = false;
  auto* ties = app.add_subcommand("ties", "enumerate every maximum shifted family");
  ranges.add_to(ties);
  budget.add_to(ties, false);
  ties->add_option("--out-dir", ties_dir, "write each maximizer to a family file here");
  ties->add_flag("--show", ties_show, "print maximizers to stderr");

  std::string family_path;
  int check_s = 0;
  int check_q = 0;
  auto* check = app.add_subcommand("check-family", "report properties of a family file");
  check->add_option("path", family_path, "family file")->required()->check(CLI::ExistingFile);
  check->add_option("--s", check_s, "number of members in a union")->required();
  check->add_option("--q", check_q, "union size cap")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (bounds->parsed()) return run_bounds(ranges, format, cache_path, !no_cache);
    if (exact->parsed()) return run_exact(ranges, budget, exact_flags, format, cache_path, !no_cache);
    if (verify->parsed()) return run_verify(ranges, budget, format, delta);
    if (oracle->parsed()) return run_oracle(ranges);
    if (ties->parsed()) return run_ties(ranges, budget, ties_dir, ties_show);
    if (check->parsed()) return run_check_family(family_path, check_s, check_q);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
