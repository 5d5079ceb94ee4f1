#pragma once

// Finite groups of nilpotency class 2 presented as central extensions.
//
// An element is a normal-form word g_1^{n_1} ... g_d^{n_d} * z with
// 0 <= n_i < m_i and z in the central part Z/c_1 x ... x Z/c_e. The data
// are the commutators [g_j, g_i] (j > i) and the power tails g_i^{m_i},
// all of which are central.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nilword/arith.hpp"
#include "nilword/error.hpp"
#include "nilword/word.hpp"

namespace nilword {

struct GeneratorDecl {
  std::string label;
  i64 order = 2;
};

using CentralVector = std::vector<i64>;

struct GroupSpec {
  std::string name;
  std::vector<GeneratorDecl> noncentral;
  std::vector<GeneratorDecl> central;
  /// (j, i) with j > i, 0-based noncentral indices -> value of [g_j, g_i].
  std::map<std::pair<int, int>, CentralVector> commutators;
  /// i -> g_i^{m_i}.
  std::map<int, CentralVector> power_tails;
};

struct Element {
  std::vector<i64> noncentral;
  std::vector<i64> central;

  friend bool operator==(const Element&, const Element&) = default;
  friend auto operator<=>(const Element&, const Element&) = default;
};

struct StructureReport {
  u64 order = 1;
  u64 derived_order = 1;
  u64 center_order = 1;
  u64 exponent = 1;
  bool is_p_group = false;
  u64 p = 0;
  bool gp_in_derived = false;
  bool is_special = false;
  bool is_extraspecial = false;
  bool quotient_at_least_derived = false;  // |G/G'| >= |G'|
};

class Group {
 public:
  /// Validates the presentation; throws GroupError naming the violated
  /// condition.
  explicit Group(GroupSpec spec);

  const GroupSpec& spec() const noexcept { return spec_; }
  const std::string& name() const noexcept { return spec_.name; }
  int noncentral_rank() const noexcept { return static_cast<int>(m_.size()); }
  int central_rank() const noexcept { return static_cast<int>(c_.size()); }
  const std::vector<i64>& noncentral_orders() const noexcept { return m_; }
  const std::vector<i64>& central_orders() const noexcept { return c_; }

  u64 order() const noexcept { return order_; }
  u64 derived_order() const noexcept { return derived_order_; }
  u64 center_order() const noexcept { return center_order_; }
  u64 exponent() const noexcept { return exponent_; }
  bool is_abelian() const noexcept { return derived_order_ == 1; }

  Element identity() const { return Element{std::vector<i64>(m_.size(), 0), std::vector<i64>(c_.size(), 0)}; }

  Element noncentral_generator(int i) const {
    Element e = identity();
    e.noncentral.at(static_cast<std::size_t>(i)) = 1;
    return e;
  }

  Element central_generator(int j) const {
    Element e = identity();
    e.central.at(static_cast<std::size_t>(j)) = mod(1, c_.at(static_cast<std::size_t>(j)));
    return e;
  }

  /// All generators, noncentral first.
  std::vector<Element> generators() const {
    std::vector<Element> g;
    for (int i = 0; i < noncentral_rank(); ++i) g.push_back(noncentral_generator(i));
    for (int j = 0; j < central_rank(); ++j) g.push_back(central_generator(j));
    return g;
  }

  /// Throws unless x has this group's shape and reduced coordinates.
  void check(const Element& x) const {
    if (x.noncentral.size() != m_.size() || x.central.size() != c_.size())
      throw std::invalid_argument("element does not belong to group " + name());
    for (std::size_t i = 0; i < m_.size(); ++i)
      if (x.noncentral[i] < 0 || x.noncentral[i] >= m_[i]) throw std::invalid_argument("element coordinate out of range");
    for (std::size_t j = 0; j < c_.size(); ++j)
      if (x.central[j] < 0 || x.central[j] >= c_[j]) throw std::invalid_argument("element coordinate out of range");
  }

  Element multiply(const Element& x, const Element& y) const {
    check(x);
    check(y);
    return mul(x, y);
  }

  Element inverse(const Element& x) const {
    check(x);
    return inv(x);
  }

  Element power(const Element& x, i64 n) const {
    check(x);
    return pow(x, n);
  }

  /// x y x^-1 y^-1.
  Element commutator(const Element& x, const Element& y) const {
    check(x);
    check(y);
    return comm(x, y);
  }

  /// Position in the lexicographic order on (noncentral, central) exponent
  /// vectors; the first noncentral coordinate is most significant.
  u64 index_of(const Element& x) const {
    u64 idx = 0;
    for (std::size_t i = 0; i < m_.size(); ++i) idx = idx * static_cast<u64>(m_[i]) + static_cast<u64>(x.noncentral[i]);
    for (std::size_t j = 0; j < c_.size(); ++j) idx = idx * static_cast<u64>(c_[j]) + static_cast<u64>(x.central[j]);
    return idx;
  }

  Element element_at(u64 idx) const {
    Element e = identity();
    for (std::size_t j = c_.size(); j-- > 0;) {
      e.central[j] = static_cast<i64>(idx % static_cast<u64>(c_[j]));
      idx /= static_cast<u64>(c_[j]);
    }
    for (std::size_t i = m_.size(); i-- > 0;) {
      e.noncentral[i] = static_cast<i64>(idx % static_cast<u64>(m_[i]));
      idx /= static_cast<u64>(m_[i]);
    }
    return e;
  }

  /// Membership of a central vector (as a central element) in G'.
  bool in_derived(const Element& x) const {
    for (auto n : x.noncentral)
      if (n != 0) return false;
    return derived_members_[central_index(x.central)] != 0;
  }

  bool is_central(const Element& x) const {
    for (int i = 0; i < noncentral_rank(); ++i)
      if (comm(x, noncentral_generator(i)) != identity()) return false;
    return true;
  }

  u64 element_order(const Element& x) const {
    Element y = x;
    u64 n = 1;
    const Element id = identity();
    while (y != id) {
      y = mul(y, x);
      ++n;
    }
    return n;
  }

  /// Elements of G', ascending index.
  std::vector<Element> derived_elements() const {
    std::vector<Element> out;
    for (u64 c = 0; c < derived_members_.size(); ++c) {
      if (!derived_members_[c]) continue;
      Element e = identity();
      e.central = central_at(c);
      out.push_back(e);
    }
    return out;
  }

  /// "n1 n2|z1 z2" (normal-form exponents).
  std::string format(const Element& x) const {
    std::string out;
    for (std::size_t i = 0; i < x.noncentral.size(); ++i) out += (i ? " " : "") + std::to_string(x.noncentral[i]);
    out += "|";
    for (std::size_t j = 0; j < x.central.size(); ++j) out += (j ? " " : "") + std::to_string(x.central[j]);
    return out;
  }

  StructureReport structure_report() const;

  // Unchecked arithmetic for hot loops; arguments must already be valid.
  Element mul(const Element& x, const Element& y) const {
    Element r;
    r.noncentral.resize(m_.size());
    r.central.resize(c_.size());
    for (std::size_t j = 0; j < c_.size(); ++j) r.central[j] = x.central[j] + y.central[j];
    const std::size_t d = m_.size();
    for (std::size_t i = 0; i < d; ++i) {
      if (y.noncentral[i] == 0) continue;
      for (std::size_t j = i + 1; j < d; ++j) {
        if (x.noncentral[j] == 0) continue;
        const CentralVector& cv = comm_[j * d + i];
        if (cv.empty()) continue;
        const i64 k = x.noncentral[j] * y.noncentral[i];
        for (std::size_t z = 0; z < c_.size(); ++z) r.central[z] += cv[z] * k;
      }
    }
    for (std::size_t i = 0; i < d; ++i) {
      i64 s = x.noncentral[i] + y.noncentral[i];
      if (s >= m_[i]) {
        s -= m_[i];
        const CentralVector& t = tails_[i];
        for (std::size_t z = 0; z < t.size(); ++z) r.central[z] += t[z];
      }
      r.noncentral[i] = s;
    }
    for (std::size_t j = 0; j < c_.size(); ++j) r.central[j] = mod(r.central[j], c_[j]);
    return r;
  }

  Element inv(const Element& x) const {
    Element y = identity();
    for (std::size_t i = 0; i < m_.size(); ++i) y.noncentral[i] = x.noncentral[i] == 0 ? 0 : m_[i] - x.noncentral[i];
    Element r = mul(x, y);
    for (std::size_t j = 0; j < c_.size(); ++j) y.central[j] = mod(-r.central[j], c_[j]);
    return y;
  }

  Element pow(const Element& x, i64 n) const {
    Element base = n < 0 ? inv(x) : x;
    u64 e = n < 0 ? static_cast<u64>(-(n + 1)) + 1 : static_cast<u64>(n);
    Element r = identity();
    while (e > 0) {
      if (e & 1) r = mul(r, base);
      e >>= 1;
      if (e) base = mul(base, base);
    }
    return r;
  }

  Element comm(const Element& x, const Element& y) const { return mul(mul(x, y), inv(mul(y, x))); }

 private:
  u64 central_index(const std::vector<i64>& z) const {
    u64 idx = 0;
    for (std::size_t j = 0; j < c_.size(); ++j) idx = idx * static_cast<u64>(c_[j]) + static_cast<u64>(z[j]);
    return idx;
  }

  std::vector<i64> central_at(u64 idx) const {
    std::vector<i64> z(c_.size());
    for (std::size_t j = c_.size(); j-- > 0;) {
      z[j] = static_cast<i64>(idx % static_cast<u64>(c_[j]));
      idx /= static_cast<u64>(c_[j]);
    }
    return z;
  }

  void validate();
  void compute_invariants();

  GroupSpec spec_;
  std::vector<i64> m_;
  std::vector<i64> c_;
  std::vector<CentralVector> comm_;   // d*d, entry j*d+i for j > i; empty = identity
  std::vector<CentralVector> tails_;  // d; empty = identity
  u64 order_ = 1;
  u64 derived_order_ = 1;
  u64 center_order_ = 1;
  u64 exponent_ = 1;
  std::vector<char> derived_members_;  // over central index space
};

inline Group build_group(GroupSpec spec) { return Group(std::move(spec)); }

inline Group::Group(GroupSpec spec) : spec_(std::move(spec)) {
  const std::size_t d = spec_.noncentral.size();
  for (const auto& g : spec_.noncentral) {
    if (g.order < 2) throw GroupError("generator " + g.label + " has order < 2");
    m_.push_back(g.order);
  }
  for (const auto& g : spec_.central) {
    if (g.order < 2) throw GroupError("central generator " + g.label + " has order < 2");
    c_.push_back(g.order);
  }
  auto normalize = [&](const CentralVector& v, const std::string& what) {
    if (v.size() != c_.size()) throw GroupError(what + ": central vector has " + std::to_string(v.size()) + " entries, expected " + std::to_string(c_.size()));
    CentralVector r(v.size());
    bool nonzero = false;
    for (std::size_t j = 0; j < v.size(); ++j) {
      r[j] = mod(v[j], c_[j]);
      nonzero = nonzero || r[j] != 0;
    }
    return nonzero ? r : CentralVector{};
  };
  comm_.assign(d * d, {});
  tails_.assign(d, {});
  for (const auto& [key, v] : spec_.commutators) {
    auto [j, i] = key;
    if (j <= i || i < 0 || static_cast<std::size_t>(j) >= d)
      throw GroupError("commutator entry (" + std::to_string(j) + "," + std::to_string(i) + ") must name noncentral generators with j > i");
    comm_[static_cast<std::size_t>(j) * d + static_cast<std::size_t>(i)] = normalize(v, "commutator [" + spec_.noncentral[j].label + "," + spec_.noncentral[i].label + "]");
  }
  for (const auto& [i, v] : spec_.power_tails) {
    if (i < 0 || static_cast<std::size_t>(i) >= d) throw GroupError("power tail for unknown generator");
    tails_[static_cast<std::size_t>(i)] = normalize(v, "power tail of " + spec_.noncentral[i].label);
  }
  for (auto m : m_) order_ = checked_mul(order_, static_cast<u64>(m));
  for (auto c : c_) order_ = checked_mul(order_, static_cast<u64>(c));
  validate();
  compute_invariants();
}

inline void Group::validate() {
  const std::size_t d = m_.size();
  // (a) [g_j, g_i] must be killed by both m_i and m_j, i.e. [g_j^{m_j}, g_i] = 1.
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const CentralVector& cv = comm_[j * d + i];
      if (cv.empty()) continue;
      for (i64 m : {m_[i], m_[j]}) {
        for (std::size_t z = 0; z < c_.size(); ++z) {
          if (mod(static_cast<i128>(cv[z]) * m, c_[z]) != 0)
            throw GroupError("condition (a) violated: [" + spec_.noncentral[j].label + "," + spec_.noncentral[i].label + "]^" + std::to_string(m) +
                             " != 1 (central coordinate " + spec_.central[z].label + ")");
        }
      }
    }
  }
  // (b) associativity on generator triples and seeded random triples.
  auto assoc = [&](const Element& a, const Element& b, const Element& c) {
    if (mul(mul(a, b), c) != mul(a, mul(b, c)))
      throw GroupError("condition (b) violated: associativity fails for (" + format(a) + ", " + format(b) + ", " + format(c) + ")");
  };
  const auto gens = generators();
  for (const auto& a : gens)
    for (const auto& b : gens)
      for (const auto& c : gens) assoc(a, b, c);
  SplitMix64 rng(0x5eed0001ULL);
  for (int t = 0; t < 1000; ++t) assoc(element_at(rng.below(order_)), element_at(rng.below(order_)), element_at(rng.below(order_)));
  // (c) commutators of generators are central.
  for (const auto& a : gens)
    for (const auto& b : gens) {
      Element c = comm(a, b);
      for (const auto& g : gens)
        if (mul(c, g) != mul(g, c)) throw GroupError("condition (c) violated: [" + format(a) + "," + format(b) + "] is not central");
    }
}

inline void Group::compute_invariants() {
  const std::size_t d = m_.size();
  // G' = subgroup of the central part generated by the commutator table.
  u64 central_size = 1;
  for (auto c : c_) central_size = checked_mul(central_size, static_cast<u64>(c));
  derived_members_.assign(central_size, 0);
  std::vector<u64> frontier{0};
  derived_members_[0] = 1;
  std::vector<CentralVector> gens;
  for (const auto& cv : comm_)
    if (!cv.empty()) gens.push_back(cv);
  while (!frontier.empty()) {
    u64 cur = frontier.back();
    frontier.pop_back();
    auto z = central_at(cur);
    for (const auto& g : gens) {
      std::vector<i64> n(z.size());
      for (std::size_t j = 0; j < z.size(); ++j) n[j] = mod(z[j] + g[j], c_[j]);
      u64 idx = central_index(n);
      if (!derived_members_[idx]) {
        derived_members_[idx] = 1;
        frontier.push_back(idx);
      }
    }
  }
  derived_order_ = static_cast<u64>(std::count(derived_members_.begin(), derived_members_.end(), 1));

  // Z(G) and exp(G): the central part is central, so only the noncentral
  // coordinates need enumerating. x = y z with z central gives x^n = y^n z^n.
  u64 noncentral_size = 1;
  for (auto m : m_) noncentral_size = checked_mul(noncentral_size, static_cast<u64>(m));
  u64 central_rows = 0;
  u64 ex = 1;
  for (auto c : c_) ex = std::lcm(ex, static_cast<u64>(c));
  Element y = identity();
  for (u64 t = 0; t < noncentral_size; ++t) {
    u64 rest = t;
    for (std::size_t i = d; i-- > 0;) {
      y.noncentral[i] = static_cast<i64>(rest % static_cast<u64>(m_[i]));
      rest /= static_cast<u64>(m_[i]);
    }
    if (is_central(y)) ++central_rows;
    ex = std::lcm(ex, element_order(y));
  }
  center_order_ = central_rows * central_size;
  exponent_ = ex;
}

inline StructureReport Group::structure_report() const {
  StructureReport r;
  r.order = order_;
  r.derived_order = derived_order_;
  r.center_order = center_order_;
  r.exponent = exponent_;
  r.quotient_at_least_derived = order_ / derived_order_ >= derived_order_;
  auto pp = prime_power(order_);
  if (!pp) return r;
  r.is_p_group = true;
  r.p = pp->first;
  const i64 p = static_cast<i64>(r.p);

  // g^p in G' for all g: the p-th power map is checked on noncentral
  // representatives y and on central generators, since (yz)^p = y^p z^p
  // and G' is a subgroup.
  bool gp = true;
  const std::size_t d = m_.size();
  u64 noncentral_size = 1;
  for (auto m : m_) noncentral_size *= static_cast<u64>(m);
  Element y = identity();
  for (u64 t = 0; t < noncentral_size && gp; ++t) {
    u64 rest = t;
    for (std::size_t i = d; i-- > 0;) {
      y.noncentral[i] = static_cast<i64>(rest % static_cast<u64>(m_[i]));
      rest /= static_cast<u64>(m_[i]);
    }
    gp = in_derived(pow(y, p));
  }
  for (int j = 0; j < central_rank() && gp; ++j) gp = in_derived(pow(central_generator(j), p));
  r.gp_in_derived = gp;

  // Special: G' = Phi(G) = Z(G) with Z(G), G/Z(G) elementary abelian.
  // Phi(G) = G^p G' here, so Phi = G' iff g^p in G'; Z = G' iff the orders
  // agree (G' <= Z); G/Z elementary follows from g^p in G' <= Z.
  bool z_elementary = true;
  for (const auto& e : derived_elements()) z_elementary = z_elementary && pow(e, p) == identity();
  r.is_special = derived_order_ > 1 && gp && center_order_ == derived_order_ && z_elementary;
  r.is_extraspecial = r.is_special && derived_order_ == r.p;
  return r;
}

/// Substitutes the tuple into w left to right.
inline Element evaluate_word(const Group& g, const Word& w, const std::vector<Element>& tuple) {
  if (static_cast<int>(tuple.size()) != w.rank())
    throw std::invalid_argument("tuple has " + std::to_string(tuple.size()) + " entries, word rank is " + std::to_string(w.rank()));
  for (const auto& x : tuple) g.check(x);
  Element acc = g.identity();
  for (const auto& s : w.syllables()) acc = g.mul(acc, g.pow(tuple[static_cast<std::size_t>(s.gen - 1)], s.exp));
  return acc;
}

/// Full multiplication table on element indices, for groups small enough
/// that |G|^2 entries fit comfortably in memory.
class CayleyTable {
 public:
  static constexpr u64 kMaxOrder = 2500;

  explicit CayleyTable(const Group& g) : n_(g.order()), exponent_(g.exponent()) {
    if (n_ > kMaxOrder) throw std::invalid_argument("group too large for a Cayley table");
    std::vector<Element> elems;
    elems.reserve(n_);
    for (u64 i = 0; i < n_; ++i) elems.push_back(g.element_at(i));
    mul_.resize(n_ * n_);
    for (u64 i = 0; i < n_; ++i)
      for (u64 j = 0; j < n_; ++j) mul_[i * n_ + j] = static_cast<std::uint32_t>(g.index_of(g.mul(elems[i], elems[j])));
    inv_.resize(n_);
    for (u64 i = 0; i < n_; ++i) inv_[i] = static_cast<std::uint32_t>(g.index_of(g.inv(elems[i])));
  }

  u64 size() const noexcept { return n_; }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const { return mul_[static_cast<u64>(a) * n_ + b]; }
  std::uint32_t inv(std::uint32_t a) const { return inv_[a]; }
  const std::uint32_t* row(std::uint32_t a) const { return mul_.data() + static_cast<u64>(a) * n_; }

  /// x -> x^e for every element.
  std::vector<std::uint32_t> power_map(i64 e) const {
    const u64 ee = static_cast<u64>(mod(e, static_cast<i64>(exponent_)));
    std::vector<std::uint32_t> out(n_);
    for (u64 x = 0; x < n_; ++x) {
      std::uint32_t r = 0, b = static_cast<std::uint32_t>(x);
      for (u64 k = ee; k > 0; k >>= 1) {
        if (k & 1) r = mul(r, b);
        b = mul(b, b);
      }
      out[x] = r;
    }
    return out;
  }

 private:
  u64 n_;
  u64 exponent_;
  std::vector<std::uint32_t> mul_;
  std::vector<std::uint32_t> inv_;
};

}  // namespace nilword
