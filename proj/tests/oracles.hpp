#pragma once

// Reference computations used to cross-check the library. They share no
// code with the enumeration engines or the collection routines beyond
// element indexing.

#include <map>
#include <set>
#include <vector>

#include "nilword/nilword.hpp"

namespace oracle {

using nilword::Element;
using nilword::Group;
using nilword::i64;
using nilword::u64;
using nilword::Word;

/// Upper unitriangular 3x3 matrix [[1,x,z],[0,1,y],[0,0,1]] over Z/m.
struct Unitri {
  i64 x = 0, y = 0, z = 0;
  friend bool operator==(const Unitri&, const Unitri&) = default;
};

struct UnitriGroup {
  i64 m;

  Unitri reduce(Unitri u) const { return {nilword::mod(u.x, m), nilword::mod(u.y, m), nilword::mod(u.z, m)}; }
  Unitri mul(const Unitri& a, const Unitri& b) const { return reduce({a.x + b.x, a.y + b.y, a.z + b.z + a.x * b.y}); }

  /// a^na b^nb z^c with a = I+E12, b = I+E23, z = I+E13.
  Unitri from(const Element& e) const { return reduce({e.noncentral[0], e.noncentral[1], e.noncentral[0] * e.noncentral[1] + e.central[0]}); }
};

/// Generic multiplication through the group API, tuple by tuple.
inline std::vector<u64> brute_force_counts(const Group& g, const Word& w, int k) {
  std::vector<u64> counts(g.order(), 0);
  std::vector<Element> all;
  for (u64 i = 0; i < g.order(); ++i) all.push_back(g.element_at(i));
  std::vector<u64> idx(static_cast<std::size_t>(k), 0);
  std::vector<Element> tuple(static_cast<std::size_t>(k));
  for (;;) {
    for (int i = 0; i < k; ++i) tuple[i] = all[idx[i]];
    Element acc = g.identity();
    for (const auto& s : w.syllables()) acc = g.multiply(acc, g.power(tuple[s.gen - 1], s.exp));
    ++counts[g.index_of(acc)];
    int j = k - 1;
    for (; j >= 0; --j) {
      if (++idx[j] < g.order()) break;
      idx[j] = 0;
    }
    if (j < 0) break;
  }
  return counts;
}

/// Derived subgroup as the closure of all element commutators.
inline std::set<u64> derived_closure(const Group& g) {
  std::set<u64> gens;
  for (u64 a = 0; a < g.order(); ++a)
    for (u64 b = 0; b < g.order(); ++b) gens.insert(g.index_of(g.commutator(g.element_at(a), g.element_at(b))));
  std::set<u64> sub = {0};
  std::vector<u64> frontier = {0};
  while (!frontier.empty()) {
    u64 x = frontier.back();
    frontier.pop_back();
    for (u64 c : gens) {
      u64 y = g.index_of(g.multiply(g.element_at(x), g.element_at(c)));
      if (sub.insert(y).second) frontier.push_back(y);
    }
  }
  return sub;
}

inline u64 center_size(const Group& g) {
  u64 n = 0;
  for (u64 a = 0; a < g.order(); ++a) {
    bool central = true;
    for (u64 b = 0; b < g.order() && central; ++b)
      central = g.multiply(g.element_at(a), g.element_at(b)) == g.multiply(g.element_at(b), g.element_at(a));
    n += central;
  }
  return n;
}

inline u64 exponent(const Group& g) {
  u64 e = 1;
  for (u64 a = 0; a < g.order(); ++a) {
    Element x = g.element_at(a), y = x;
    u64 n = 1;
    while (y != g.identity()) {
      y = g.multiply(y, x);
      ++n;
    }
    e = std::lcm(e, n);
  }
  return e;
}

}  // namespace oracle
