#pragma once

// Named group families and the line-oriented presentation file format.
//
//   group <name>
//   gen <label> order <m>
//   cgen <label> order <c>
//   pow <label> = <central-word>
//   comm <labelJ> <labelI> = <central-word>     (J declared after I)
//   end
//
// Central words are products of central labels with optional integer
// exponents, e.g. "z1^2 z2"; "1" or nothing is the identity.

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nilword/group.hpp"

namespace nilword {

inline GroupSpec heisenberg_spec(i64 p, int e) {
  if (!is_prime(p) || e < 1) throw GroupError("heisenberg needs a prime p and e >= 1");
  const i64 q = static_cast<i64>(ipow(static_cast<u64>(p), static_cast<unsigned>(e)));
  GroupSpec s;
  s.name = "heisenberg:" + std::to_string(p) + ":" + std::to_string(e);
  s.noncentral = {{"a", q}, {"b", q}};
  s.central = {{"z", q}};
  // a = I + E12, b = I + E23, z = I + E13, so [a,b] = z and [b,a] = z^-1.
  s.commutators[{1, 0}] = {q - 1};
  return s;
}

/// Order p^{1+2n}; '+' has exponent p, '-' has exponent p^2 (a_1^p = z).
inline GroupSpec extraspecial_spec(i64 p, int n, bool plus) {
  if (!is_prime(p)) throw GroupError("extraspecial needs a prime p");
  if (p == 2) throw GroupError("extraspecial groups with p = 2 are not supported");
  if (n < 1) throw GroupError("extraspecial needs n >= 1");
  GroupSpec s;
  s.name = "extraspecial:" + std::to_string(p) + ":" + std::to_string(n) + ":" + (plus ? "+" : "-");
  for (int i = 1; i <= n; ++i) {
    s.noncentral.push_back({"a" + std::to_string(i), p});
    s.noncentral.push_back({"b" + std::to_string(i), p});
    s.commutators[{2 * i - 1, 2 * i - 2}] = {p - 1};
  }
  s.central = {{"z", p}};
  if (!plus) s.power_tails[0] = {1};
  return s;
}

/// Special group of order p^9: e1..e4, f1..f5 with [e1,e2]=f1, [e1,e3]=f2,
/// [e1,e4]=f3, [e2,e3]=f4, [e2,e4]=f5, [e3,e4]=1.
inline GroupSpec special9_spec(i64 p) {
  if (!is_prime(p)) throw GroupError("special9 needs a prime p");
  GroupSpec s;
  s.name = "special9:" + std::to_string(p);
  for (int i = 1; i <= 4; ++i) s.noncentral.push_back({"e" + std::to_string(i), p});
  for (int j = 1; j <= 5; ++j) s.central.push_back({"f" + std::to_string(j), p});
  auto f_inverse = [&](int j) {
    CentralVector v(5, 0);
    v[static_cast<std::size_t>(j - 1)] = p - 1;
    return v;
  };
  // Table entries hold [e_j, e_i] = [e_i, e_j]^-1.
  s.commutators[{1, 0}] = f_inverse(1);
  s.commutators[{2, 0}] = f_inverse(2);
  s.commutators[{3, 0}] = f_inverse(3);
  s.commutators[{2, 1}] = f_inverse(4);
  s.commutators[{3, 1}] = f_inverse(5);
  return s;
}

inline GroupSpec cyclic_spec(i64 n) {
  if (n < 2) throw GroupError("cyclic needs n >= 2");
  GroupSpec s;
  s.name = "cyclic:" + std::to_string(n);
  s.noncentral = {{"g", n}};
  return s;
}

inline GroupSpec product_spec(const GroupSpec& a, const GroupSpec& b) {
  GroupSpec s;
  auto part = [](const std::string& n) { return n.find(',') == std::string::npos ? n : "(" + n + ")"; };
  s.name = "product:" + part(a.name) + "," + part(b.name);
  const int da = static_cast<int>(a.noncentral.size());
  const std::size_t ca = a.central.size(), cb = b.central.size();
  auto label = [](const std::string& l, const char* side) { return l + side; };
  for (const auto& g : a.noncentral) s.noncentral.push_back({label(g.label, "_1"), g.order});
  for (const auto& g : b.noncentral) s.noncentral.push_back({label(g.label, "_2"), g.order});
  for (const auto& g : a.central) s.central.push_back({label(g.label, "_1"), g.order});
  for (const auto& g : b.central) s.central.push_back({label(g.label, "_2"), g.order});
  auto widen = [&](const CentralVector& v, bool left) {
    CentralVector w(ca + cb, 0);
    for (std::size_t j = 0; j < v.size(); ++j) w[left ? j : ca + j] = v[j];
    return w;
  };
  for (const auto& [key, v] : a.commutators) s.commutators[key] = widen(v, true);
  for (const auto& [key, v] : b.commutators) s.commutators[{key.first + da, key.second + da}] = widen(v, false);
  for (const auto& [i, v] : a.power_tails) s.power_tails[i] = widen(v, true);
  for (const auto& [i, v] : b.power_tails) s.power_tails[i + da] = widen(v, false);
  return s;
}

namespace detail {

inline std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline i64 parse_i64(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    i64 v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line) + ": expected integer, got '" + s + "'", line);
  }
}

inline CentralVector parse_central_word(const std::vector<std::string>& toks, std::size_t first, const GroupSpec& spec, std::size_t line) {
  CentralVector v(spec.central.size(), 0);
  for (std::size_t t = first; t < toks.size(); ++t) {
    if (toks[t] == "1") continue;
    std::string label = toks[t];
    i64 e = 1;
    if (auto caret = label.find('^'); caret != std::string::npos) {
      e = parse_i64(label.substr(caret + 1), line);
      label = label.substr(0, caret);
    }
    bool found = false;
    for (std::size_t j = 0; j < spec.central.size(); ++j) {
      if (spec.central[j].label == label) {
        v[j] += e;
        found = true;
      }
    }
    if (!found) throw ParseError("line " + std::to_string(line) + ": unknown central generator '" + label + "'", line);
  }
  return v;
}

}  // namespace detail

/// Parses the presentation file format. ParseError positions are line numbers.
inline GroupSpec parse_presentation(std::string_view text) {
  GroupSpec spec;
  bool seen_group = false, seen_end = false;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  auto noncentral_index = [&](const std::string& label, std::size_t line) {
    for (std::size_t i = 0; i < spec.noncentral.size(); ++i)
      if (spec.noncentral[i].label == label) return static_cast<int>(i);
    throw ParseError("line " + std::to_string(line) + ": unknown generator '" + label + "'", line);
  };
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    auto toks = detail::split_ws(raw);
    if (toks.empty()) continue;
    if (seen_end) throw ParseError("line " + std::to_string(lineno) + ": content after 'end'", lineno);
    const std::string& kw = toks[0];
    if (kw == "group") {
      if (toks.size() != 2 || seen_group) throw ParseError("line " + std::to_string(lineno) + ": expected 'group <name>' once", lineno);
      spec.name = toks[1];
      seen_group = true;
    } else if (kw == "gen" || kw == "cgen") {
      if (toks.size() != 4 || toks[2] != "order") throw ParseError("line " + std::to_string(lineno) + ": expected '" + kw + " <label> order <n>'", lineno);
      if (!spec.commutators.empty() || !spec.power_tails.empty())
        throw ParseError("line " + std::to_string(lineno) + ": generators must be declared before relations", lineno);
      GeneratorDecl g{toks[1], detail::parse_i64(toks[3], lineno)};
      (kw == "gen" ? spec.noncentral : spec.central).push_back(g);
    } else if (kw == "pow") {
      if (toks.size() < 3 || toks[2] != "=") throw ParseError("line " + std::to_string(lineno) + ": expected 'pow <label> = <central-word>'", lineno);
      spec.power_tails[noncentral_index(toks[1], lineno)] = detail::parse_central_word(toks, 3, spec, lineno);
    } else if (kw == "comm") {
      if (toks.size() < 4 || toks[3] != "=") throw ParseError("line " + std::to_string(lineno) + ": expected 'comm <J> <I> = <central-word>'", lineno);
      int j = noncentral_index(toks[1], lineno), i = noncentral_index(toks[2], lineno);
      if (j <= i) throw ParseError("line " + std::to_string(lineno) + ": comm needs J declared after I", lineno);
      spec.commutators[{j, i}] = detail::parse_central_word(toks, 4, spec, lineno);
    } else if (kw == "end") {
      seen_end = true;
    } else {
      throw ParseError("line " + std::to_string(lineno) + ": unknown keyword '" + kw + "'", lineno);
    }
  }
  if (!seen_group) throw ParseError("missing 'group' line", 0);
  if (!seen_end) throw ParseError("missing 'end' line", lineno);
  return spec;
}

inline std::string emit_presentation(const GroupSpec& spec) {
  std::ostringstream out;
  auto central_word = [&](const CentralVector& v) {
    std::string w;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] == 0) continue;
      if (!w.empty()) w += ' ';
      w += spec.central[j].label;
      if (v[j] != 1) w += "^" + std::to_string(v[j]);
    }
    return w.empty() ? std::string("1") : w;
  };
  out << "group " << spec.name << "\n";
  for (const auto& g : spec.noncentral) out << "gen " << g.label << " order " << g.order << "\n";
  for (const auto& g : spec.central) out << "cgen " << g.label << " order " << g.order << "\n";
  for (const auto& [i, v] : spec.power_tails) out << "pow " << spec.noncentral[i].label << " = " << central_word(v) << "\n";
  for (const auto& [key, v] : spec.commutators)
    out << "comm " << spec.noncentral[key.first].label << " " << spec.noncentral[key.second].label << " = " << central_word(v) << "\n";
  out << "end\n";
  return out.str();
}

namespace detail {

inline std::vector<std::string> split_fields(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t end = s.find(sep, start);
    out.emplace_back(s.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (end == std::string_view::npos) return out;
    start = end + 1;
  }
}

/// Index of the comma separating the two factors of a product, skipping
/// commas nested inside parentheses or inner products.
inline std::size_t product_split(std::string_view body) {
  int depth = 0;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] == '(') ++depth;
    if (body[i] == ')') --depth;
    if (body[i] == ',' && depth == 0) return i;
  }
  return std::string_view::npos;
}

inline std::string_view strip_parens(std::string_view s) {
  while (s.size() >= 2 && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
  return s;
}

inline i64 catalog_int(const std::string& s, std::string_view whole) {
  try {
    std::size_t used = 0;
    i64 v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw GroupError("invalid parameter '" + s + "' in group spec '" + std::string(whole) + "'");
}

}  // namespace detail

/// Resolves a catalog spec string to a presentation:
///   heisenberg:p:e  extraspecial:p:n:+|-  special9:p  cyclic:n
///   product:A,B     file:PATH
/// Nested products can be grouped with parentheses: product:(product:A,B),C
inline GroupSpec catalog_spec(std::string_view text) {
  text = detail::strip_parens(text);
  const auto colon = text.find(':');
  const std::string family(text.substr(0, colon));
  const std::string_view body = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  auto fields = detail::split_fields(body, ':');
  auto need = [&](std::size_t n) {
    if (colon == std::string_view::npos || fields.size() != n) throw GroupError("group spec '" + std::string(text) + "' needs " + std::to_string(n) + " parameters");
  };
  if (family == "heisenberg") {
    need(2);
    return heisenberg_spec(detail::catalog_int(fields[0], text), static_cast<int>(detail::catalog_int(fields[1], text)));
  }
  if (family == "extraspecial") {
    need(3);
    if (fields[2] != "+" && fields[2] != "-") throw GroupError("extraspecial sign must be + or -");
    return extraspecial_spec(detail::catalog_int(fields[0], text), static_cast<int>(detail::catalog_int(fields[1], text)), fields[2] == "+");
  }
  if (family == "special9") {
    need(1);
    return special9_spec(detail::catalog_int(fields[0], text));
  }
  if (family == "cyclic") {
    need(1);
    return cyclic_spec(detail::catalog_int(fields[0], text));
  }
  if (family == "product") {
    auto cut = detail::product_split(body);
    if (colon == std::string_view::npos || cut == std::string_view::npos) throw GroupError("product needs two comma-separated factors");
    return product_spec(catalog_spec(body.substr(0, cut)), catalog_spec(body.substr(cut + 1)));
  }
  if (family == "file") {
    std::ifstream in{std::string(body)};
    if (!in) throw GroupError("cannot open presentation file '" + std::string(body) + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_presentation(buf.str());
  }
  throw GroupError("unknown group family '" + family + "'");
}

inline Group catalog_group(std::string_view text) { return Group(catalog_spec(text)); }

/// Families with an example spec each, for the CLI's catalog listing.
inline std::vector<std::pair<std::string, std::string>> catalog_families() {
  return {
      {"heisenberg:p:e", "3x3 unitriangular matrices over Z/p^e, order p^{3e}"},
      {"extraspecial:p:n:+", "extraspecial of order p^{1+2n}, exponent p (odd p)"},
      {"extraspecial:p:n:-", "extraspecial of order p^{1+2n}, exponent p^2 (odd p)"},
      {"special9:p", "special group of order p^9 with |G/G'| = p^4 < |G'| = p^5"},
      {"cyclic:n", "cyclic group of order n"},
      {"product:A,B", "direct product; parenthesize nested products"},
      {"file:PATH", "presentation file"},
  };
}

}  // namespace nilword
