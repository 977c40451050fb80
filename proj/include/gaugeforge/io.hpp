#pragma once

// Plain-text file formats: k-vectors, integrands, decompositions, chains.
// Blank lines and text after '#' are ignored everywhere.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "gaugeforge/chains.hpp"
#include "gaugeforge/integrands.hpp"
#include "gaugeforge/rational_grassmannian.hpp"
#include "gaugeforge/upc.hpp"

namespace gaugeforge {

namespace io_detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  return out;
}

/// Content lines with comments stripped, paired with 1-based line numbers.
inline std::vector<std::pair<int, std::string>> content_lines(const std::string& text) {
  std::vector<std::pair<int, std::string>> out;
  std::istringstream in(text);
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (!line.empty()) out.emplace_back(no, line);
  }
  return out;
}

inline bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

inline int parse_int(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (...) {
    throw ParseError("malformed integer for " + what + ": '" + s + "'");
  }
  if (used != s.size()) throw ParseError("malformed integer for " + what + ": '" + s + "'");
  return v;
}

/// Whitespace-separated key=value tokens, e.g. "n=4 k=2".
inline std::map<std::string, std::string> key_values(const std::string& line) {
  std::map<std::string, std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError("expected key=value, got '" + tok + "'");
    out[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return out;
}

inline std::string with_line(int no, const std::string& msg) { return "line " + std::to_string(no) + ": " + msg; }

}  // namespace io_detail

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// k-vectors

/// A parsed k-vector: always as doubles, and as rationals when every
/// coefficient was written as p or p/q.
struct ParsedKVector {
  KVectorD value;
  std::optional<KVectorQ> exact;
};

/// Terms "1,2 = 3/5" separated by newlines or ';'. `k` is inferred from
/// the first term when not given.
inline ParsedKVector parse_kvector(const std::string& text, int n, std::optional<int> k = std::nullopt) {
  using namespace io_detail;
  std::vector<std::pair<std::vector<int>, std::string>> terms;
  for (const auto& [no, line] : content_lines(text))
    for (const auto& part : split(line, ';')) {
      if (part.empty()) continue;
      auto eq = part.find('=');
      if (eq == std::string::npos) throw ParseError("k-vector term without '=': '" + part + "'");
      std::vector<int> idx;
      std::string lhs = trim(part.substr(0, eq));
      if (!lhs.empty())
        for (const auto& e : split(lhs, ',')) idx.push_back(parse_int(e, "multi-index entry"));
      std::string rhs = trim(part.substr(eq + 1));
      if (rhs.empty()) throw ParseError("k-vector term without coefficient: '" + part + "'");
      terms.emplace_back(std::move(idx), std::move(rhs));
    }
  if (!k) {
    if (terms.empty()) throw ParseError("empty k-vector needs an explicit degree");
    k = static_cast<int>(terms[0].first.size());
  }
  check_degree(n, *k);
  KVectorD value(n, *k);
  KVectorQ exact(n, *k);
  std::vector<bool> seen(value.size(), false);
  bool all_rational = true;
  for (const auto& [idx, lit] : terms) {
    if (static_cast<int>(idx.size()) != *k) throw ParseError("k-vector terms of mixed degree");
    MultiIndex mi;
    try {
      mi = MultiIndex::from_entries(n, idx);
    } catch (const ArgumentError& e) {
      throw ParseError(e.what());
    }
    auto r = static_cast<std::size_t>(index_rank(n, mi.mask()));
    if (seen[r]) throw ParseError("coefficient of " + mi.str() + " given twice");
    seen[r] = true;
    if (is_rational_literal(lit)) {
      exact[r] = parse_rational(lit);
      value[r] = exact[r].get_d();
    } else {
      all_rational = false;
      value[r] = parse_double(lit);
      exact[r] = exact_rational(value[r]);
    }
  }
  ParsedKVector out{std::move(value), std::nullopt};
  if (all_rational) out.exact = std::move(exact);
  return out;
}

template <class S>
std::string format_kvector_terms(const KVector<S>& a, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (ScalarTraits<S>::is_zero(a[i])) continue;
    if (!out.empty()) out += sep;
    out += a.index(i).str() + " = ";
    if constexpr (std::is_same_v<S, Rational>) out += format_rational(a[i]);
    else out += format_double(a[i]);
  }
  return out;
}

/// One term per line, lexicographic, zero coefficients omitted.
template <class S>
std::string format_kvector(const KVector<S>& a) {
  std::string s = format_kvector_terms(a, "\n");
  return s.empty() ? s : s + "\n";
}

/// The same terms on one line separated by "; ".
template <class S>
std::string format_kvector_inline(const KVector<S>& a) {
  return format_kvector_terms(a, "; ");
}

/// A Grassmannian point; rational input that is exactly unit keeps its
/// exact coordinates and factors.
inline GrassmannPoint to_grassmann_point(const ParsedKVector& p) {
  if (p.exact && inner(*p.exact, *p.exact) == 1) {
    auto factors = exact_factors(*p.exact);
    if (!factors) throw ArgumentError("Grassmannian point must be simple");
    return GrassmannPoint::from_exact(*p.exact, factors->factors());
  }
  return GrassmannPoint(p.value);
}

inline GrassmannPoint parse_grassmann_point(const std::string& text, int n, std::optional<int> k = std::nullopt) {
  return to_grassmann_point(parse_kvector(text, n, k));
}

inline std::string format_point(const GrassmannPoint& p) {
  if (p.exact()) return format_kvector_inline(*p.exact());
  return format_kvector_inline(p.vec());
}

// ---------------------------------------------------------------------------
// Integrands

/// kind=area|linear_dip|tabulated|composite, n= k=, param.NAME=value,
/// lip=, sup=, `omega: <k-vector>`, `atom: <k-vector> value: <decimal>`,
/// `part: w=<decimal> file=<path>` (relative to `base_dir`).
inline Integrand parse_integrand(const std::string& text, const std::string& base_dir = ".") {
  using namespace io_detail;
  std::map<std::string, std::string> kv;
  std::optional<std::string> omega_text;
  std::vector<std::pair<std::string, std::string>> atoms;
  std::vector<std::pair<double, std::string>> parts;
  for (const auto& [no, line] : content_lines(text)) {
    try {
      if (starts_with(line, "omega:")) {
        omega_text = line.substr(6);
      } else if (starts_with(line, "atom:")) {
        auto pos = line.find("value:");
        if (pos == std::string::npos) throw ParseError("atom line without 'value:'");
        atoms.emplace_back(line.substr(5, pos - 5), trim(line.substr(pos + 6)));
      } else if (starts_with(line, "part:")) {
        auto p = key_values(line.substr(5));
        if (!p.count("w") || !p.count("file")) throw ParseError("part line needs w= and file=");
        parts.emplace_back(parse_double(p["w"]), p["file"]);
      } else {
        for (auto& [key, value] : key_values(line)) {
          if (kv.count(key)) throw ParseError("key '" + key + "' given twice");
          kv[key] = value;
        }
      }
    } catch (const ParseError& e) {
      throw ParseError(with_line(no, e.what()));
    }
  }
  if (!kv.count("kind")) throw ParseError("integrand file has no kind=");
  std::string kind = kv["kind"];
  auto get_param = [&](const std::string& name) {
    auto it = kv.find("param." + name);
    if (it == kv.end()) throw ParseError("integrand needs param." + name);
    return parse_double(it->second);
  };
  auto get_nk = [&](int& n, int& k) {
    if (!kv.count("n") || !kv.count("k")) throw ParseError(kind + " integrand needs n= and k=");
    n = parse_int(kv["n"], "n");
    k = parse_int(kv["k"], "k");
  };
  std::optional<double> lip, sup;
  if (kv.count("lip")) lip = parse_double(kv["lip"]);
  if (kv.count("sup")) sup = parse_double(kv["sup"]);
  for (const auto& [key, value] : kv)
    if (key != "kind" && key != "n" && key != "k" && key != "lip" && key != "sup" && !starts_with(key, "param."))
      throw ParseError("unknown integrand key '" + key + "'");

  std::optional<Integrand> f;
  if (kind == "area") {
    int n = 0, k = 0;
    get_nk(n, k);
    f = Integrand::area(n, k);
  } else if (kind == "linear_dip") {
    int n = 0, k = 0;
    get_nk(n, k);
    if (!omega_text) throw ParseError("linear_dip integrand needs an omega: line");
    f = Integrand::linear_dip(get_param("a"), parse_grassmann_point(*omega_text, n, k));
  } else if (kind == "tabulated") {
    int n = 0, k = 0;
    get_nk(n, k);
    std::vector<TableEntry> table;
    for (const auto& [pt, val] : atoms) table.push_back({parse_grassmann_point(pt, n, k), parse_double(val)});
    double floor = kv.count("param.floor") ? get_param("floor") : kIntegrandFloor;
    f = Integrand::tabulated(std::move(table), lip, floor);
  } else if (kind == "composite") {
    std::vector<Integrand::Part> ps;
    for (const auto& [w, file] : parts) {
      std::filesystem::path p(file);
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      ps.push_back({w, parse_integrand(read_text_file(p.string()), p.parent_path().string())});
    }
    f = Integrand::composite(std::move(ps));
  } else {
    throw ParseError("unknown integrand kind '" + kind + "'");
  }
  if (lip) f->set_lip(*lip);
  if (sup) f->set_sup(*sup);
  return *f;
}

inline Integrand load_integrand(const std::string& path) {
  return parse_integrand(read_text_file(path), std::filesystem::path(path).parent_path().string());
}

/// Inverse of parse_integrand for the non-composite kinds.
inline std::string format_integrand(const Integrand& f) {
  std::ostringstream out;
  out << "kind=" << to_string(f.kind()) << "\n";
  out << "n=" << f.n() << " k=" << f.k() << "\n";
  switch (f.kind()) {
    case IntegrandKind::area:
      break;
    case IntegrandKind::linear_dip:
      out << "param.a=" << format_double(f.params().at("a")) << "\n";
      out << "omega: " << format_point(*f.omega()) << "\n";
      break;
    case IntegrandKind::tabulated:
      out << "param.floor=" << format_double(f.params().at("floor")) << "\n";
      for (const auto& e : f.table()) out << "atom: " << format_point(e.point) << " value: " << format_double(e.value) << "\n";
      break;
    case IntegrandKind::composite:
      throw ArgumentError("composite integrands are written as separate part files");
  }
  if (f.lip() && !f.lip_estimated()) out << "lip=" << format_double(*f.lip()) << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Decompositions

/// Header `n= k=` (or `n_hint`), `eta0: <k-vector>`, and lines
/// `atom: m=<rational|decimal> eta=<k-vector>`.
inline Decomposition parse_decomposition(const std::string& text, std::optional<int> n_hint = std::nullopt) {
  using namespace io_detail;
  std::optional<int> n = n_hint, k;
  std::optional<std::string> eta0_text;
  std::vector<std::tuple<int, std::string, std::string>> atoms;
  for (const auto& [no, line] : content_lines(text)) {
    try {
      if (starts_with(line, "eta0:")) {
        if (eta0_text) throw ParseError("eta0 given twice");
        eta0_text = line.substr(5);
      } else if (starts_with(line, "atom:")) {
        std::string rest = trim(line.substr(5));
        if (!starts_with(rest, "m=")) throw ParseError("atom line must start with m=");
        auto sp = rest.find_first_of(" \t");
        if (sp == std::string::npos) throw ParseError("atom line without eta=");
        std::string m = rest.substr(2, sp - 2);
        std::string tail = trim(rest.substr(sp));
        if (!starts_with(tail, "eta=")) throw ParseError("atom line without eta=");
        atoms.emplace_back(no, m, tail.substr(4));
      } else {
        for (auto& [key, value] : key_values(line)) {
          if (key == "n") n = parse_int(value, "n");
          else if (key == "k") k = parse_int(value, "k");
          else throw ParseError("unknown decomposition key '" + key + "'");
        }
      }
    } catch (const ParseError& e) {
      throw ParseError(with_line(no, e.what()));
    }
  }
  if (!n) throw ParseError("decomposition needs n= (header or integrand)");
  if (!eta0_text) throw ParseError("decomposition has no eta0 line");
  Decomposition dec;
  dec.eta0 = parse_grassmann_point(*eta0_text, *n, k);
  for (const auto& [no, m, eta] : atoms) {
    try {
      DecompositionAtom a;
      if (is_rational_literal(m)) {
        a.m_exact = parse_rational(m);
        a.m = a.m_exact->get_d();
      } else {
        a.m = parse_double(m);
      }
      a.eta = parse_grassmann_point(eta, *n, dec.eta0.k());
      dec.atoms.push_back(std::move(a));
    } catch (const ParseError& e) {
      throw ParseError(with_line(no, e.what()));
    }
  }
  return dec;
}

inline Decomposition load_decomposition(const std::string& path, std::optional<int> n_hint = std::nullopt) {
  return parse_decomposition(read_text_file(path), n_hint);
}

inline std::string format_decomposition(const Decomposition& dec) {
  std::ostringstream out;
  out << "n=" << dec.n() << " k=" << dec.k() << "\n";
  out << "eta0: " << format_point(dec.eta0) << "\n";
  for (const auto& a : dec.atoms)
    out << "atom: m=" << (a.m_exact ? format_rational(*a.m_exact) : format_double(a.m)) << " eta=" << format_point(a.eta)
        << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Chains

/// Header `n=<int> k=<int>`, then `term a=<rational> v0=<csv> | v1=<csv> ...`.
inline PolyhedralChain parse_chain(const std::string& text) {
  using namespace io_detail;
  std::optional<PolyhedralChain> chain;
  for (const auto& [no, line] : content_lines(text)) {
    try {
      if (starts_with(line, "term")) {
        if (!chain) throw ParseError("term before the n= k= header");
        std::string rest = trim(line.substr(4));
        if (!starts_with(rest, "a=")) throw ParseError("term must start with a=");
        auto sp = rest.find_first_of(" \t");
        if (sp == std::string::npos) throw ParseError("term without vertices");
        std::string a = rest.substr(2, sp - 2);
        if (!is_rational_literal(a)) throw ParseError("chain coefficients must be rational");
        std::vector<PointQ> verts;
        auto fields = split(rest.substr(sp), '|');
        for (std::size_t i = 0; i < fields.size(); ++i) {
          std::string tag = "v" + std::to_string(i) + "=";
          if (!starts_with(fields[i], tag)) throw ParseError("expected " + tag);
          PointQ p;
          for (const auto& c : split(fields[i].substr(tag.size()), ',')) {
            if (!is_rational_literal(c)) throw ParseError("chain vertices must be rational");
            p.push_back(parse_rational(c));
          }
          if (static_cast<int>(p.size()) != chain->n()) throw ParseError("vertex has wrong dimension");
          verts.push_back(std::move(p));
        }
        if (static_cast<int>(verts.size()) != chain->k() + 1) throw ParseError("term needs k+1 vertices");
        chain->add(parse_rational(a), OrientedSimplex(std::move(verts)));
      } else {
        auto kv = key_values(line);
        if (chain || !kv.count("n") || !kv.count("k") || kv.size() != 2) throw ParseError("expected a single n= k= header");
        chain = PolyhedralChain(parse_int(kv["n"], "n"), parse_int(kv["k"], "k"));
      }
    } catch (const ParseError& e) {
      throw ParseError(with_line(no, e.what()));
    }
  }
  if (!chain) throw ParseError("chain file has no n= k= header");
  return *chain;
}

inline PolyhedralChain load_chain(const std::string& path) { return parse_chain(read_text_file(path)); }

inline std::string format_chain(const PolyhedralChain& t) {
  std::ostringstream out;
  out << "n=" << t.n() << " k=" << t.k() << "\n";
  for (const auto& term : t.terms()) {
    out << "term a=" << format_rational(term.a);
    const auto& vs = term.simplex.vertices();
    for (std::size_t i = 0; i < vs.size(); ++i) {
      out << (i == 0 ? " " : " | ") << "v" << i << "=";
      for (std::size_t j = 0; j < vs[i].size(); ++j) out << (j ? "," : "") << format_rational(vs[i][j]);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace gaugeforge
