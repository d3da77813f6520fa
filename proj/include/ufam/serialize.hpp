#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ufam/catalog.hpp"
#include "ufam/search.hpp"

namespace ufam {

using json = nlohmann::json;

inline json masks_to_json(const std::vector<Mask>& masks) {
  json out = json::array();
  for (Mask m : masks) out.push_back(mask_elements(m));
  return out;
}

inline std::vector<Mask> masks_from_json(const json& j, int ground) {
  std::vector<Mask> out;
  for (const auto& set : j) {
    auto elems = set.get<std::vector<int>>();
    out.push_back(make_set(elems, ground).mask());
  }
  return out;
}

inline json to_json(const BoundRecord& r) {
  json j{{"n", r.quad.n},           {"k", r.quad.k},
         {"s", r.quad.s},           {"q", r.quad.q},
         {"p", r.quad.p},           {"r", r.quad.r},
         {"value", r.value},        {"kind", to_string(r.kind)},
         {"provenance", to_string(r.provenance)}, {"citation", r.citation}};
  if (r.argmax) j["argmax"] = *r.argmax;
  return j;
}

inline BoundRecord bound_record_from_json(const json& j) {
  BoundRecord r;
  r.quad = ParamQuad::make(j.at("n"), j.at("k"), j.at("s"), j.at("q"));
  r.value = j.at("value").get<Count>();
  r.kind = bound_kind_from_string(j.at("kind"));
  r.provenance = provenance_from_string(j.at("provenance"));
  r.citation = j.value("citation", "");
  if (j.contains("argmax")) r.argmax = j.at("argmax").get<int>();
  return r;
}

inline json to_json(const Checkpoint& cp) {
  return json{{"n", cp.quad.n},
              {"k", cp.quad.k},
              {"s", cp.quad.s},
              {"q", cp.quad.q},
              {"restricted", cp.restricted},
              {"prefix", cp.prefix},
              {"first_done", cp.first_done},
              {"best_value", cp.best_value},
              {"best_witness", masks_to_json(cp.best_witness)}};
}

inline Checkpoint checkpoint_from_json(const json& j) {
  Checkpoint cp;
  cp.quad = ParamQuad::make(j.at("n"), j.at("k"), j.at("s"), j.at("q"));
  cp.restricted = j.value("restricted", true);
  cp.prefix = j.at("prefix").get<std::string>();
  cp.first_done = j.at("first_done").get<std::string>();
  if (cp.prefix.size() != cp.first_done.size()) throw std::invalid_argument("checkpoint bitstrings differ in length");
  for (char c : cp.prefix + cp.first_done)
    if (c != '0' && c != '1') throw std::invalid_argument("checkpoint bitstrings must be 0/1");
  cp.best_value = j.at("best_value").get<Count>();
  cp.best_witness = masks_from_json(j.at("best_witness"), cp.quad.n);
  return cp;
}

inline void save_checkpoint(const std::string& path, const Checkpoint& cp) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_json(cp).dump(2) << "\n";
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return checkpoint_from_json(json::parse(in));
}

/// One line of a campaign table.
struct ResultRow {
  ParamQuad quad;
  Count value = 0;
  BoundKind kind = BoundKind::Lower;
  Provenance provenance = Provenance::Construction;
  std::string citation;
  std::string status;  // search status, or "formula"
  std::uint64_t nodes = 0;
  double elapsed_ms = 0;
  std::vector<BoundRecord> records;
};

inline const char* kCsvHeader = "n,k,s,q,p,r,value,kind,provenance,status,nodes,elapsed_ms";

inline std::string csv_line(const ResultRow& row) {
  std::ostringstream os;
  os << row.quad.n << ',' << row.quad.k << ',' << row.quad.s << ',' << row.quad.q << ',' << row.quad.p << ','
     << row.quad.r << ',' << row.value << ',' << to_string(row.kind) << ',' << to_string(row.provenance) << ','
     << row.status << ',' << row.nodes << ',' << row.elapsed_ms;
  return os.str();
}

inline json to_json(const ResultRow& row) {
  json recs = json::array();
  for (const auto& r : row.records) recs.push_back(to_json(r));
  return json{{"n", row.quad.n},
              {"k", row.quad.k},
              {"s", row.quad.s},
              {"q", row.quad.q},
              {"p", row.quad.p},
              {"r", row.quad.r},
              {"value", row.value},
              {"kind", to_string(row.kind)},
              {"provenance", to_string(row.provenance)},
              {"citation", row.citation},
              {"status", row.status},
              {"nodes", row.nodes},
              {"elapsed_ms", row.elapsed_ms},
              {"records", recs}};
}

inline std::string render_csv(const std::vector<ResultRow>& rows) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : rows) out += csv_line(r) + "\n";
  return out;
}

inline std::string render_json(const std::vector<ResultRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) arr.push_back(to_json(r));
  return arr.dump(2) + "\n";
}

}  // namespace ufam
