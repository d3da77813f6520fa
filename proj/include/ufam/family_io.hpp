#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ufam/family.hpp"

namespace ufam {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline bool parse_int(std::string_view s, int& out) {
  s = trim(s);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace detail

/// Family text format:
///   ground=<n> k=<k>
///   1,2,3
///   1,2,4   # trailing comments allowed
inline Family read_family(std::istream& in) {
  std::string raw;
  int line_no = 0;
  int ground = -1;
  int k = -1;
  std::vector<Mask> masks;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    if (ground < 0) {
      std::istringstream hs{std::string(line)};
      std::string tok;
      while (hs >> tok) {
        auto eq = tok.find('=');
        int value = 0;
        if (eq == std::string::npos || !detail::parse_int(std::string_view(tok).substr(eq + 1), value))
          throw ParseError(line_no, "malformed header token '" + tok + "'");
        auto key = tok.substr(0, eq);
        if (key == "ground")
          ground = value;
        else if (key == "k")
          k = value;
        else
          throw ParseError(line_no, "unknown header key '" + key + "'");
      }
      if (ground < 1 || ground > kMaxGround) throw ParseError(line_no, "header needs ground=<n> with 1 <= n <= 64");
      if (k < 1 || k > ground) throw ParseError(line_no, "header needs k=<k> with 1 <= k <= ground");
      continue;
    }

    std::vector<int> elems;
    std::size_t start = 0;
    while (start <= line.size()) {
      auto comma = line.find(',', start);
      auto tok = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      int v = 0;
      if (!detail::parse_int(tok, v)) throw ParseError(line_no, "bad integer '" + std::string(detail::trim(tok)) + "'");
      elems.push_back(v);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    KSet s;
    try {
      s = make_set(elems, ground);
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
    if (s.k() != k) throw ParseError(line_no, "set has " + std::to_string(s.k()) + " elements, expected " + std::to_string(k));
    masks.push_back(s.mask());
  }
  if (ground < 0) throw ParseError(line_no, "missing header line 'ground=<n> k=<k>'");
  return Family(ground, k, std::move(masks));
}

inline Family read_family_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_family(in);
}

inline void write_family(std::ostream& out, const Family& f) {
  out << "ground=" << f.ground() << " k=" << f.k() << "\n";
  for (Mask m : f.masks()) {
    bool first = true;
    for (int e : mask_elements(m)) {
      if (!first) out << ',';
      out << e;
      first = false;
    }
    out << "\n";
  }
}

inline std::string family_to_text(const Family& f) {
  std::ostringstream os;
  write_family(os, f);
  return os.str();
}

}  // namespace ufam
