#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace taxi {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

enum class EdgeWeightType { euc_2d, ceil_2d, att };

inline const char* to_string(EdgeWeightType t) {
  switch (t) {
    case EdgeWeightType::euc_2d: return "EUC_2D";
    case EdgeWeightType::ceil_2d: return "CEIL_2D";
    case EdgeWeightType::att: return "ATT";
  }
  return "?";
}

// Parsed TSPLIB problem. Coordinates are stored 0-based: coords[i] is the
// city with TSPLIB id i+1.
struct Instance {
  std::string name;
  int dimension = 0;
  EdgeWeightType edge_weight_type = EdgeWeightType::euc_2d;
  std::vector<Point> coords;
};

// Visiting order: a permutation of 0..n-1.
struct Tour {
  std::vector<int> order;

  int size() const { return static_cast<int>(order.size()); }

  bool is_permutation() const {
    std::vector<char> seen(order.size(), 0);
    for (int c : order) {
      if (c < 0 || c >= static_cast<int>(order.size()) || seen[c]) return false;
      seen[c] = 1;
    }
    return true;
  }
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
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

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

// Locale-independent numeric parsing; the whole token must be consumed.
template <typename T>
bool parse_number(std::string_view tok, T& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

struct LineReader {
  std::string_view text;
  std::size_t pos = 0;
  int line_no = 0;

  bool next(std::string_view& line) {
    if (pos >= text.size()) return false;
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      line = text.substr(pos);
      pos = text.size();
    } else {
      line = text.substr(pos, nl - pos);
      pos = nl + 1;
    }
    ++line_no;
    return true;
  }
};

// Splits "KEY : VALUE" / "KEY: VALUE" / "KEY:VALUE"; returns false when the
// line has no colon (section markers, data lines).
inline bool split_keyword(std::string_view line, std::string& key, std::string& value) {
  std::size_t colon = line.find(':');
  if (colon == std::string_view::npos) return false;
  std::string_view k = trim(line.substr(0, colon));
  if (k.empty() || k.find(' ') != std::string_view::npos) return false;
  key.assign(k);
  value.assign(trim(line.substr(colon + 1)));
  return true;
}

}  // namespace detail

// Parses a TSPLIB instance with a NODE_COORD_SECTION. Unknown "KEY : VALUE"
// headers are ignored; unknown data sections are rejected.
inline Instance parse_instance(std::string_view text) {
  using namespace detail;
  Instance inst;
  bool have_dimension = false;
  bool have_type = false;
  std::string ewt;

  LineReader rd{text};
  std::string_view line;
  std::string key, value;
  bool in_coords = false;

  while (rd.next(line)) {
    std::string_view t = trim(line);
    if (t.empty()) continue;
    if (t == "EOF") break;
    if (!in_coords) {
      if (t == "NODE_COORD_SECTION") {
        if (!have_dimension) throw ParseError("NODE_COORD_SECTION before DIMENSION", rd.line_no);
        in_coords = true;
        inst.coords.assign(inst.dimension, Point{});
        // read exactly `dimension` coordinate lines
        std::vector<char> seen(inst.dimension, 0);
        int count = 0;
        while (count < inst.dimension) {
          if (!rd.next(line)) throw ParseError("coordinate count mismatch: expected " +
                                               std::to_string(inst.dimension) + ", got " +
                                               std::to_string(count), rd.line_no);
          std::string_view c = trim(line);
          if (c.empty()) continue;
          if (c == "EOF") throw ParseError("coordinate count mismatch: expected " +
                                           std::to_string(inst.dimension) + ", got " +
                                           std::to_string(count), rd.line_no);
          auto toks = split_ws(c);
          if (toks.size() != 3) throw ParseError("expected 'id x y' coordinate triple", rd.line_no);
          int id = 0;
          double x = 0, y = 0;
          if (!parse_number(toks[0], id)) throw ParseError("malformed city id '" + std::string(toks[0]) + "'", rd.line_no);
          if (!parse_number(toks[1], x)) throw ParseError("malformed coordinate '" + std::string(toks[1]) + "'", rd.line_no);
          if (!parse_number(toks[2], y)) throw ParseError("malformed coordinate '" + std::string(toks[2]) + "'", rd.line_no);
          if (id < 1 || id > inst.dimension) throw ParseError("city id " + std::to_string(id) + " out of range", rd.line_no);
          if (seen[id - 1]) throw ParseError("duplicate city id " + std::to_string(id), rd.line_no);
          seen[id - 1] = 1;
          inst.coords[id - 1] = Point{x, y};
          ++count;
        }
        continue;
      }
      if (t.size() > 8 && t.substr(t.size() - 8) == "_SECTION")
        throw ParseError("unsupported section '" + std::string(t) + "'", rd.line_no);
      if (split_keyword(t, key, value)) {
        if (key == "NAME") {
          inst.name = value;
        } else if (key == "TYPE") {
          have_type = true;
          if (value != "TSP") throw ParseError("unsupported TYPE '" + value + "' (want TSP)", rd.line_no);
        } else if (key == "DIMENSION") {
          int n = 0;
          if (!parse_number(std::string_view(value), n) || n < 1)
            throw ParseError("malformed DIMENSION '" + value + "'", rd.line_no);
          inst.dimension = n;
          have_dimension = true;
        } else if (key == "EDGE_WEIGHT_TYPE") {
          ewt = value;
          if (value == "EUC_2D") inst.edge_weight_type = EdgeWeightType::euc_2d;
          else if (value == "CEIL_2D") inst.edge_weight_type = EdgeWeightType::ceil_2d;
          else if (value == "ATT") inst.edge_weight_type = EdgeWeightType::att;
          else throw ParseError("unsupported EDGE_WEIGHT_TYPE '" + value + "'", rd.line_no);
        }
        // other keywords (COMMENT, NODE_COORD_TYPE, ...) are ignored
        continue;
      }
      throw ParseError("unrecognized line '" + std::string(t) + "'", rd.line_no);
    }
    // after the coord section only EOF / blank lines are meaningful
    throw ParseError("unexpected content after NODE_COORD_SECTION", rd.line_no);
  }

  if (!have_dimension) throw ParseError("missing DIMENSION", rd.line_no);
  if (ewt.empty()) throw ParseError("missing EDGE_WEIGHT_TYPE", rd.line_no);
  if (!in_coords) throw ParseError("missing NODE_COORD_SECTION", rd.line_no);
  (void)have_type;
  return inst;
}

// Parses a TSPLIB tour file: TOUR_SECTION with 1-based ids ending in -1.
// Returns a 0-based permutation of size n.
inline Tour parse_tour(std::string_view text, int n) {
  using namespace detail;
  Tour tour;
  tour.order.reserve(static_cast<std::size_t>(n));
  std::vector<char> seen(static_cast<std::size_t>(n), 0);

  LineReader rd{text};
  std::string_view line;
  std::string key, value;
  bool in_section = false;
  bool terminated = false;

  while (rd.next(line)) {
    std::string_view t = trim(line);
    if (t.empty()) continue;
    if (t == "EOF") break;
    if (!in_section) {
      if (t == "TOUR_SECTION") {
        in_section = true;
        continue;
      }
      if (split_keyword(t, key, value)) {
        if (key == "DIMENSION") {
          int d = 0;
          if (!parse_number(std::string_view(value), d))
            throw ParseError("malformed DIMENSION '" + value + "'", rd.line_no);
          if (d != n)
            throw ParseError("tour DIMENSION " + std::to_string(d) + " does not match instance size " +
                             std::to_string(n), rd.line_no);
        }
        continue;
      }
      throw ParseError("unrecognized line '" + std::string(t) + "'", rd.line_no);
    }
    if (terminated) throw ParseError("unexpected content after -1 terminator", rd.line_no);
    for (auto tok : split_ws(t)) {
      int id = 0;
      if (!parse_number(tok, id)) throw ParseError("malformed tour entry '" + std::string(tok) + "'", rd.line_no);
      if (id == -1) {
        terminated = true;
        break;
      }
      if (terminated) throw ParseError("tour entry after -1 terminator", rd.line_no);
      if (id < 1 || id > n) throw ParseError("city id " + std::to_string(id) + " out of range [1," +
                                             std::to_string(n) + "]", rd.line_no);
      if (seen[id - 1]) throw ParseError("duplicate city " + std::to_string(id), rd.line_no);
      seen[id - 1] = 1;
      tour.order.push_back(id - 1);
    }
  }

  if (!in_section) throw ParseError("missing TOUR_SECTION", rd.line_no);
  if (!terminated) throw ParseError("missing -1 terminator", rd.line_no);
  if (static_cast<int>(tour.order.size()) != n)
    throw ParseError("tour has " + std::to_string(tour.order.size()) + " cities, expected " +
                     std::to_string(n), rd.line_no);
  return tour;
}

// Serializes a tour in TSPLIB .tour format (1-based ids, -1 terminator).
// Round-trips through parse_tour.
inline std::string write_tour(const Tour& tour, const std::string& name) {
  std::string out;
  out += "NAME : " + (name.empty() ? std::string("UNNAMED") : name) + ".tour\n";
  out += "TYPE : TOUR\n";
  out += "DIMENSION : " + std::to_string(tour.order.size()) + "\n";
  out += "TOUR_SECTION\n";
  for (int c : tour.order) out += std::to_string(c + 1) + "\n";
  out += "-1\nEOF\n";
  return out;
}

}  // namespace taxi
