#pragma once

// Exact word-map distributions P_{w,G}(g) = |w^{-1}(g)| / |G|^k by fiber
// enumeration, sampled estimates, and the probability bounds for groups of
// class 2.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "nilword/arith.hpp"
#include "nilword/canonical.hpp"
#include "nilword/class2.hpp"
#include "nilword/error.hpp"
#include "nilword/group.hpp"
#include "nilword/word.hpp"

namespace nilword {

using Rational = boost::multiprecision::cpp_rational;

inline std::string format_rational(const Rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

constexpr u64 kDefaultBudget = 500'000'000;

enum class Engine {
  class2,  // evaluates the class-2 normal form with bilinear commutator updates
  direct,  // evaluates the word syllable by syllable
};

struct DistOptions {
  u64 budget = kDefaultBudget;  // word evaluations
  unsigned jobs = 1;
  Engine engine = Engine::class2;
};

struct Dist {
  std::string group;
  u64 group_order = 0;
  int rank = 1;
  std::vector<u64> counts;  // by element index
  u64 total = 0;            // |G|^k, or the sample count when approximate
  bool approximate = false;

  Rational probability(u64 idx) const { return Rational(counts.at(idx)) / Rational(total); }

  u64 support_size() const {
    return static_cast<u64>(std::count_if(counts.begin(), counts.end(), [](u64 c) { return c != 0; }));
  }

  bool uniform() const {
    return std::all_of(counts.begin(), counts.end(), [&](u64 c) { return c == counts.front(); });
  }

  bool surjective() const { return support_size() == counts.size(); }

  /// Smallest nonzero count and the first element attaining it.
  std::pair<u64, u64> min_on_image() const {
    u64 best = 0, at = 0;
    for (u64 i = 0; i < counts.size(); ++i)
      if (counts[i] != 0 && (best == 0 || counts[i] < best)) {
        best = counts[i];
        at = i;
      }
    return {best, at};
  }

  friend bool operator==(const Dist&, const Dist&) = default;
};

inline std::string to_csv(const Group& g, const Dist& d) {
  std::ostringstream out;
  out << "element,count,probability\n";
  for (u64 i = 0; i < d.counts.size(); ++i) out << g.format(g.element_at(i)) << ',' << d.counts[i] << ',' << format_rational(d.probability(i)) << "\n";
  return out.str();
}

namespace detail {

/// Element arithmetic on indices, through a Cayley table when the group is
/// small enough and through collection otherwise.
class IndexArith {
 public:
  explicit IndexArith(const Group& g) : g_(g), n_(g.order()) {
    if (n_ <= CayleyTable::kMaxOrder) table_.emplace(g);
  }

  u64 size() const { return n_; }

  u64 mul(u64 a, u64 b) const {
    if (table_) return table_->mul(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b));
    return g_.index_of(g_.multiply(g_.element_at(a), g_.element_at(b)));
  }
  u64 inv(u64 a) const {
    if (table_) return table_->inv(static_cast<std::uint32_t>(a));
    return g_.index_of(g_.inverse(g_.element_at(a)));
  }
  u64 comm(u64 a, u64 b) const { return mul(mul(a, b), inv(mul(b, a))); }
  u64 pow(u64 a, i64 e) const {
    if (table_) {
      u64 r = 0, b = a;
      for (u64 k = static_cast<u64>(mod(e, static_cast<i64>(g_.exponent()))); k > 0; k >>= 1) {
        if (k & 1) r = mul(r, b);
        b = mul(b, b);
      }
      return r;
    }
    return g_.index_of(g_.power(g_.element_at(a), e));
  }

  /// x -> x^e on all elements, cached per exponent class mod exp(G).
  const std::vector<u64>& power_map(i64 e) {
    const i64 key = mod(e, static_cast<i64>(g_.exponent()));
    auto it = powers_.find(key);
    if (it != powers_.end()) return it->second;
    std::vector<u64> m(n_);
    for (u64 x = 0; x < n_; ++x) m[x] = pow(x, key);
    return powers_.emplace(key, std::move(m)).first->second;
  }

 private:
  const Group& g_;
  u64 n_;
  std::optional<CayleyTable> table_;
  std::map<i64, std::vector<u64>> powers_;
};

inline u64 checked_power(u64 base, int e) {
  u64 r = 1;
  for (int i = 0; i < e; ++i) {
    if (base != 0 && r > UINT64_MAX / base) return UINT64_MAX;
    r *= base;
  }
  return r;
}

/// Word map data after reducing exponents mod exp(G) and dropping variables
/// the map does not depend on.
struct ReducedWord {
  std::vector<int> used;                      // original variable indices
  std::vector<i64> a;                         // per used variable
  std::vector<std::vector<i64>> beta;         // beta[m][n], m < n, positions in `used`
  std::vector<std::pair<int, i64>> syllables; // positions in `used`, for the direct engine
};

inline ReducedWord reduce_word(const Word& w, i64 exponent, Engine engine) {
  ReducedWord r;
  const int k = w.rank();
  std::vector<int> pos(static_cast<std::size_t>(k) + 1, -1);
  if (engine == Engine::class2) {
    Class2Form f = class2_normal_form(w);
    ModForm m = ModForm::from(f, exponent);
    std::vector<char> needed(static_cast<std::size_t>(k) + 1, 0);
    for (int i = 1; i <= k; ++i) needed[i] = m.a(i) != 0;
    for (int i = 1; i <= k; ++i)
      for (int j = i + 1; j <= k; ++j)
        if (m.b(i, j) != 0) needed[i] = needed[j] = 1;
    for (int i = 1; i <= k; ++i)
      if (needed[i]) {
        pos[i] = static_cast<int>(r.used.size());
        r.used.push_back(i);
        r.a.push_back(m.a(i));
      }
    const std::size_t u = r.used.size();
    r.beta.assign(u, std::vector<i64>(u, 0));
    for (std::size_t x = 0; x < u; ++x)
      for (std::size_t y = x + 1; y < u; ++y) r.beta[x][y] = m.b(r.used[x], r.used[y]);
  } else {
    for (const auto& s : w.syllables())
      if (pos[s.gen] < 0) pos[s.gen] = 0;
    for (int i = 1; i <= k; ++i)
      if (pos[i] == 0) {
        pos[i] = static_cast<int>(r.used.size());
        r.used.push_back(i);
      }
    for (const auto& s : w.syllables()) r.syllables.push_back({pos[s.gen], s.exp});
  }
  return r;
}

/// Counts w over all tuples of the used variables whose first coordinate
/// lies in [lo, hi).
class FiberCounter {
 public:
  FiberCounter(IndexArith& ar, const ReducedWord& rw, Engine engine) : ar_(ar), rw_(rw), engine_(engine) {
    const std::size_t u = rw.used.size();
    if (engine == Engine::class2) {
      for (std::size_t i = 0; i < u; ++i) pa_.push_back(&ar.power_map(rw.a[i]));
      pb_.assign(u, std::vector<const std::vector<u64>*>(u, nullptr));
      for (std::size_t m = 0; m < u; ++m)
        for (std::size_t n = m + 1; n < u; ++n)
          if (rw.beta[m][n] != 0) pb_[m][n] = &ar.power_map(rw.beta[m][n]);
    } else {
      for (const auto& [v, e] : rw.syllables) ps_.push_back(&ar.power_map(e));
    }
  }

  void count(u64 lo, u64 hi, std::vector<u64>& out) const {
    const std::size_t u = rw_.used.size();
    if (engine_ == Engine::direct) {
      std::vector<u64> tuple(u, 0);
      if (u == 0) {
        out[0] += 1;
        return;
      }
      tuple[0] = lo;
      while (tuple[0] < hi) {
        u64 acc = 0;
        for (std::size_t s = 0; s < ps_.size(); ++s) acc = ar_.mul(acc, (*ps_[s])[tuple[rw_.syllables[s].first]]);
        ++out[acc];
        std::size_t j = u;
        while (j-- > 0) {
          if (++tuple[j] < (j == 0 ? hi : ar_.size())) break;
          if (j == 0) break;
          tuple[j] = 0;
        }
      }
      return;
    }
    if (u == 0) {
      out[0] += 1;
      return;
    }
    std::vector<std::vector<u64>> h(u + 1, std::vector<u64>(u, 0));
    recurse(0, 0, lo, hi, h, out);
  }

 private:
  // h[d][n]: product of g_m^{beta_{m,n}} over m < d.
  void recurse(std::size_t d, u64 acc, u64 lo, u64 hi, std::vector<std::vector<u64>>& h, std::vector<u64>& out) const {
    const std::size_t u = rw_.used.size();
    const std::vector<u64>& pa = *pa_[d];
    const u64 hd = h[d][d];
    if (d + 1 == u) {
      if (hd == 0) {
        for (u64 g = lo; g < hi; ++g) ++out[ar_.mul(acc, pa[g])];
      } else {
        for (u64 g = lo; g < hi; ++g) ++out[ar_.mul(ar_.mul(acc, pa[g]), ar_.comm(hd, g))];
      }
      return;
    }
    for (u64 g = lo; g < hi; ++g) {
      u64 next = ar_.mul(acc, pa[g]);
      if (hd != 0) next = ar_.mul(next, ar_.comm(hd, g));
      for (std::size_t n = d + 1; n < u; ++n) h[d + 1][n] = pb_[d][n] ? ar_.mul(h[d][n], (*pb_[d][n])[g]) : h[d][n];
      recurse(d + 1, next, 0, ar_.size(), h, out);
    }
  }

  IndexArith& ar_;
  const ReducedWord& rw_;
  Engine engine_;
  std::vector<const std::vector<u64>*> pa_;
  std::vector<std::vector<const std::vector<u64>*>> pb_;
  std::vector<const std::vector<u64>*> ps_;
};

}  // namespace detail

/// Number of word evaluations exact_distribution would perform.
inline u64 required_evaluations(const Group& g, const Word& w, Engine engine = Engine::class2) {
  auto rw = detail::reduce_word(w, static_cast<i64>(g.exponent()), engine);
  return detail::checked_power(g.order(), static_cast<int>(rw.used.size()));
}

/// Enumerates every tuple of the variables w depends on, in lexicographic
/// element order, and scales by |G| for each variable it ignores. Workers
/// take contiguous ranges of the first variable; their tables are summed.
inline Dist exact_distribution(const Group& g, const Word& w, int k, const DistOptions& opt = {}) {
  if (k < w.rank()) throw std::invalid_argument("k = " + std::to_string(k) + " is below the word rank " + std::to_string(w.rank()));
  const u64 n = g.order();
  const u64 total = detail::checked_power(n, k);
  auto rw = detail::reduce_word(w, static_cast<i64>(g.exponent()), opt.engine);
  const u64 required = detail::checked_power(n, static_cast<int>(rw.used.size()));
  if (required > opt.budget || total == UINT64_MAX) throw BudgetExceeded(std::max(required, total == UINT64_MAX ? UINT64_MAX : required), opt.budget);

  detail::IndexArith ar(g);
  detail::FiberCounter counter(ar, rw, opt.engine);
  Dist d{g.name(), n, k, std::vector<u64>(n, 0), total, false};

  const u64 first = rw.used.empty() ? 1 : n;
  const u64 jobs = std::clamp<u64>(opt.jobs, 1, first);
  if (jobs == 1) {
    counter.count(0, first, d.counts);
  } else {
    std::vector<std::vector<u64>> parts(jobs, std::vector<u64>(n, 0));
    std::vector<std::thread> threads;
    for (u64 j = 0; j < jobs; ++j) {
      const u64 lo = first * j / jobs, hi = first * (j + 1) / jobs;
      threads.emplace_back([&, j, lo, hi] { counter.count(lo, hi, parts[j]); });
    }
    for (auto& t : threads) t.join();
    for (const auto& part : parts)
      for (u64 i = 0; i < n; ++i) d.counts[i] += part[i];
  }
  const u64 scale = detail::checked_power(n, k - static_cast<int>(rw.used.size()));
  if (scale != 1)
    for (auto& c : d.counts) c *= scale;
  return d;
}

/// Seeded estimate: each sample draws x_1..x_k in order as
/// SplitMix64::below(|G|) element indices.
inline Dist sampled_distribution(const Group& g, const Word& w, int k, u64 samples, u64 seed) {
  if (samples < 1) throw std::invalid_argument("need at least one sample");
  if (k < w.rank()) throw std::invalid_argument("k is below the word rank");
  detail::IndexArith ar(g);
  std::vector<const std::vector<u64>*> ps;
  for (const auto& s : w.syllables()) ps.push_back(&ar.power_map(s.exp));
  SplitMix64 rng(seed);
  Dist d{g.name(), g.order(), k, std::vector<u64>(g.order(), 0), samples, true};
  std::vector<u64> tuple(static_cast<std::size_t>(k));
  for (u64 s = 0; s < samples; ++s) {
    for (auto& x : tuple) x = rng.below(g.order());
    u64 acc = 0;
    for (std::size_t i = 0; i < ps.size(); ++i) acc = ar.mul(acc, (*ps[i])[tuple[w.syllables()[i].gen - 1]]);
    ++d.counts[acc];
  }
  return d;
}

struct SameResult {
  bool equal = true;
  std::optional<u64> first_divergence;  // element index
  Rational left;
  Rational right;
};

inline SameResult compare_distributions(const Dist& a, const Dist& b) {
  SameResult r;
  for (u64 i = 0; i < a.counts.size(); ++i) {
    // counts/totals compared by cross-multiplication
    if (static_cast<u128>(a.counts[i]) * b.total != static_cast<u128>(b.counts[i]) * a.total) {
      r.equal = false;
      r.first_divergence = i;
      r.left = a.probability(i);
      r.right = b.probability(i);
      return r;
    }
  }
  return r;
}

/// Compares P_{w1,G} and P_{w2,G}, each over its own rank.
inline SameResult same_distribution(const Group& g, const Word& w1, const Word& w2, const DistOptions& opt = {}) {
  return compare_distributions(exact_distribution(g, w1, w1.rank(), opt), exact_distribution(g, w2, w2.rank(), opt));
}

// ---------------------------------------------------------------------------
// Bounds

struct BoundReport {
  std::string group;
  u64 order = 0;
  u64 derived_order = 0;
  int rank = 1;

  Rational min_prob_on_image;
  u64 argmin = 0;
  Rational improved_bound;  // 1 / (|G'| |G|)
  Rational amit_bound;      // 1 / |G|
  std::optional<Rational> square_bound;  // 1 / |G'|^2, when p is odd and g^p in G'

  bool improved_holds = false;
  bool amit_holds_on_image = false;
  std::optional<bool> square_holds;
  bool literal_improved_holds = false;  // bound at every g in G, not only the image
  bool uniform = false;
  bool surjective = false;

  // hypotheses
  bool p_group = false;
  u64 p = 0;
  bool odd_p = false;
  bool gp_in_derived = false;
  bool extraspecial = false;
  bool power_word = false;       // automorphic to x_1^{p^r}
  bool surjective_word = false;  // abelianization coprime to |G|

  /// Cases where min-on-image >= 1/|G| is known to hold.
  bool amit_applicable() const { return (odd_p && gp_in_derived) || extraspecial || power_word || surjective_word; }
};

inline u64 int_gcd_of_exponents(const Word& w) {
  Class2Form f = class2_normal_form(w);
  BigInt t = 0;
  for (const auto& a : f.abelian) t = boost::multiprecision::gcd(t, boost::multiprecision::abs(a));
  return static_cast<u64>(t);  // abelianization gcd is bounded by word length
}

/// True when no prime divisor of |G| divides the abelianization gcd.
inline bool coprime_abelianization(const Group& g, const Word& w) {
  const u64 t = int_gcd_of_exponents(w);
  for (u64 p : prime_divisors(g.order()))
    if (t % p == 0) return false;
  return true;
}

inline int exponent_valuation(u64 exponent, u64 p) {
  int e = 0;
  while (exponent > 1) {
    exponent /= p;
    ++e;
  }
  return e;
}

inline BoundReport bound_report(const Group& g, const Word& w, int k, const DistOptions& opt = {}) {
  Dist d = exact_distribution(g, w, k, opt);
  StructureReport s = g.structure_report();
  BoundReport b;
  b.group = g.name();
  b.order = g.order();
  b.derived_order = g.derived_order();
  b.rank = k;
  auto [cmin, at] = d.min_on_image();
  b.min_prob_on_image = Rational(cmin) / Rational(d.total);
  b.argmin = at;
  b.improved_bound = Rational(1) / (Rational(b.derived_order) * Rational(b.order));
  b.amit_bound = Rational(1) / Rational(b.order);
  b.improved_holds = b.min_prob_on_image >= b.improved_bound;
  b.amit_holds_on_image = b.min_prob_on_image >= b.amit_bound;
  b.uniform = d.uniform();
  b.surjective = d.surjective();
  b.literal_improved_holds = b.surjective && b.improved_holds;
  b.p_group = s.is_p_group;
  b.p = s.p;
  b.odd_p = s.is_p_group && s.p % 2 == 1;
  b.gp_in_derived = s.gp_in_derived;
  b.extraspecial = s.is_extraspecial;
  if (b.odd_p && b.gp_in_derived) {
    b.square_bound = Rational(1) / (Rational(b.derived_order) * Rational(b.derived_order));
    b.square_holds = b.min_prob_on_image >= *b.square_bound;
  }
  b.surjective_word = coprime_abelianization(g, w);
  if (s.is_p_group && g.exponent() > 1) {
    const int E = exponent_valuation(g.exponent(), s.p);
    auto c = canonicalize(w.with_rank(k), static_cast<i64>(s.p), E);
    b.power_word = c.vform.variant == VVariant::power_with_tail && std::none_of(c.vform.s.begin(), c.vform.s.end(), [](const auto& x) { return x.has_value(); });
  }
  return b;
}

// ---------------------------------------------------------------------------
// Kernel maps from the fiber argument for chain words
//   w = x_1^{t_0} [x_1,x_2]^{t_1} ... [x_{k-1},x_k]^{t_{k-1}}
// with a witness tuple (g_1..g_k).

class KernelMaps {
 public:
  KernelMaps(const Group& g, std::vector<i64> t, std::vector<Element> witness)
      : g_(g), t_(std::move(t)), witness_(std::move(witness)), k_(static_cast<int>(t_.size())) {
    if (k_ < 1 || static_cast<int>(witness_.size()) != k_) throw std::invalid_argument("witness length must equal the chain rank");
    word_ = ChainForm{k_, 2, 1, t_}.word();
  }

  int rank() const { return k_; }
  int odd_count() const { return (k_ + 1) / 2; }  // slots 1, 3, 5, ...
  int even_count() const { return k_ / 2; }       // slots 2, 4, ...
  const Word& word() const { return word_; }

  Element value() const { return evaluate_word(g_, word_, witness_); }

  /// w with odd slots replaced by y (the first must lie in G').
  Element phi_odd(const std::vector<Element>& y) const { return evaluate_word(g_, word_, fill(y, 1)); }

  /// g_1^{-t_0} w with even slots replaced by y.
  Element phi_even(const std::vector<Element>& y) const {
    return g_.multiply(g_.power(witness_[0], -t_[0]), evaluate_word(g_, word_, fill(y, 2)));
  }

  /// Same formula as phi_odd, on all of G in the first slot.
  Element psi_odd(const std::vector<Element>& y) const { return phi_odd(y); }

  /// The psi variant needs an odd p-group with g^p in G', and t_0 != 1 so
  /// that it lands in G'.
  bool psi_applicable() const {
    auto s = g_.structure_report();
    return s.is_p_group && s.p % 2 == 1 && s.gp_in_derived && t_[0] != 1;
  }

  u64 kernel_odd(u64 budget) const { return kernel(odd_count(), true, budget, [&](const auto& y) { return phi_odd(y); }); }
  u64 kernel_even(u64 budget) const { return kernel(even_count(), false, budget, [&](const auto& y) { return phi_even(y); }); }
  u64 kernel_psi(u64 budget) const { return kernel(odd_count(), false, budget, [&](const auto& y) { return psi_odd(y); }); }

  /// Size of the subset of the fiber built from the kernels: tuples with odd
  /// slots g_odd y and even slots g_even z, for y in the odd kernel (psi when
  /// `psi`) and z in the even kernel taken at the shifted odd slots. Every y
  /// is checked to keep the value, so this never exceeds the fiber.
  u64 constructed(bool psi, u64 budget) const {
    const Element target = value();
    u64 total = 0;
    visit_kernel(odd_count(), !psi, budget, [&](const auto& y) { return phi_odd(y); }, [&](const std::vector<Element>& y) {
      std::vector<Element> shifted = witness_;
      for (std::size_t i = 0; i < y.size(); ++i) shifted[2 * i] = g_.multiply(witness_[2 * i], y[i]);
      if (evaluate_word(g_, word_, shifted) != target) return;
      total += KernelMaps(g_, t_, shifted).kernel_even(budget);
    });
    return total;
  }

 private:
  std::vector<Element> fill(const std::vector<Element>& y, int first) const {
    std::vector<Element> tuple = witness_;
    for (std::size_t i = 0; i < y.size(); ++i) tuple[first - 1 + 2 * i] = y[i];
    return tuple;
  }

  template <class F>
  u64 kernel(int slots, bool first_in_derived, u64 budget, F f) const {
    u64 count = 0;
    visit_kernel(slots, first_in_derived, budget, f, [&](const std::vector<Element>&) { ++count; });
    return count;
  }

  template <class F, class V>
  void visit_kernel(int slots, bool first_in_derived, u64 budget, F f, V visit) const {
    if (slots == 0) {
      visit(std::vector<Element>{});
      return;
    }
    std::vector<Element> first_choices = first_in_derived ? g_.derived_elements() : all_elements();
    std::vector<Element> rest = all_elements();
    const u64 size = static_cast<u64>(first_choices.size()) * detail::checked_power(g_.order(), slots - 1);
    if (size > budget) throw BudgetExceeded(size, budget);
    const Element id = g_.identity();
    std::vector<std::size_t> idx(static_cast<std::size_t>(slots), 0);
    std::vector<Element> y(static_cast<std::size_t>(slots));
    for (;;) {
      y[0] = first_choices[idx[0]];
      for (int i = 1; i < slots; ++i) y[i] = rest[idx[i]];
      if (f(y) == id) visit(y);
      int j = slots - 1;
      for (; j >= 0; --j) {
        const std::size_t lim = j == 0 ? first_choices.size() : rest.size();
        if (++idx[j] < lim) break;
        idx[j] = 0;
      }
      if (j < 0) break;
    }
  }

  std::vector<Element> all_elements() const {
    std::vector<Element> out;
    out.reserve(g_.order());
    for (u64 i = 0; i < g_.order(); ++i) out.push_back(g_.element_at(i));
    return out;
  }

  const Group& g_;
  std::vector<i64> t_;
  std::vector<Element> witness_;
  int k_;
  Word word_;
};

struct KernelBound {
  u64 kernel_odd = 0;
  u64 kernel_even = 0;
  u64 product = 0;                   // |ker phi_odd| |ker phi_even|
  u64 constructed = 0;               // fiber subset built from ker phi_odd
  Rational generic;                  // |G|^{k-1} / |G'|
  std::optional<u64> kernel_psi;
  std::optional<u64> psi_product;    // |ker psi_odd| |ker phi_even|
  std::optional<u64> psi_constructed;
  std::optional<Rational> psi_generic;  // |G|^k / |G'|^2
};

inline KernelBound kernel_lower_bound(const Group& g, const std::vector<i64>& t, const std::vector<Element>& witness, u64 budget = kDefaultBudget) {
  KernelMaps maps(g, t, witness);
  KernelBound b;
  b.kernel_odd = maps.kernel_odd(budget);
  b.kernel_even = maps.kernel_even(budget);
  b.product = b.kernel_odd * b.kernel_even;
  b.constructed = maps.constructed(false, budget);
  const int k = maps.rank();
  b.generic = Rational(detail::checked_power(g.order(), k - 1)) / Rational(g.derived_order());
  if (maps.psi_applicable()) {
    b.kernel_psi = maps.kernel_psi(budget);
    b.psi_product = *b.kernel_psi * b.kernel_even;
    b.psi_constructed = maps.constructed(true, budget);
    b.psi_generic = Rational(detail::checked_power(g.order(), k)) / Rational(g.derived_order() * g.derived_order());
  }
  return b;
}

// ---------------------------------------------------------------------------

struct SurjectivityRecord {
  u64 abelianization_gcd = 0;
  std::vector<u64> primes;
  std::vector<u64> dividing_primes;  // primes of |G| dividing the gcd
  bool predicted_surjective = false;
  bool predicted_uniform = false;
  std::optional<bool> empirical_surjective;
  std::optional<bool> empirical_uniform;

  /// Surjective <=> uniform <=> predicted, where the empirical side is known.
  std::optional<bool> equivalence_holds() const {
    if (!empirical_surjective) return std::nullopt;
    return *empirical_surjective == predicted_surjective && *empirical_uniform == predicted_uniform && *empirical_surjective == *empirical_uniform;
  }
};

inline SurjectivityRecord classify_surjectivity(const Group& g, const Word& w, const DistOptions& opt = {}, bool require_empirical = false) {
  SurjectivityRecord r;
  r.abelianization_gcd = int_gcd_of_exponents(w);
  r.primes = prime_divisors(g.order());
  for (u64 p : r.primes)
    if (r.abelianization_gcd % p == 0) r.dividing_primes.push_back(p);
  r.predicted_surjective = r.predicted_uniform = r.dividing_primes.empty();
  try {
    Dist d = exact_distribution(g, w, w.rank(), opt);
    r.empirical_surjective = d.surjective();
    r.empirical_uniform = d.uniform();
  } catch (const BudgetExceeded&) {
    if (require_empirical) throw;
  }
  return r;
}

/// Algebraic replay plus, when a group is given, equality of the source
/// and target distributions on it.
inline CertificateVerdict verify_certificate(const Certificate& cert, const Group& g, const DistOptions& opt = {}) {
  CertificateVerdict v = verify_certificate(cert);
  const u64 q = static_cast<u64>(cert.context.modulus());
  if (q % g.exponent() != 0) {
    v.passed = false;
    v.failures.push_back({cert.steps.size(), "exp(G) = " + std::to_string(g.exponent()) + " does not divide p^E = " + std::to_string(q)});
    return v;
  }
  auto same = compare_distributions(exact_distribution(g, cert.source, cert.rank, opt), exact_distribution(g, cert.target, cert.rank, opt));
  v.empirical_checked = true;
  if (!same.equal) {
    v.passed = false;
    v.failures.push_back({cert.steps.size(), "distributions differ at " + g.format(g.element_at(*same.first_divergence)) + ": " + format_rational(same.left) + " vs " +
                                                 format_rational(same.right)});
  }
  return v;
}

}  // namespace nilword
