#pragma once

// Canonical forms of words up to F_k(G)-automorphism for p-groups G of
// class 2 with exp(G) | p^E:
//
//   chain form   x_1^{t_0} [x_1,x_2]^{t_1} ... [x_{k-1},x_k]^{t_{k-1}},  t_i in {0, 1, p, ..., p^{E-1}}
//   v-form       x_1^{p^r} (linked chain with increasing valuations) (disjoint commutators)
//
// Every rewrite is a substitution recorded in a Certificate, so the claim
// "source and target are F_k(G)-automorphic" can be replayed on the class-2
// normal form modulo p^E.

#include <algorithm>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nilword/arith.hpp"
#include "nilword/class2.hpp"
#include "nilword/word.hpp"

namespace nilword {

namespace detail {

/// "x1^e [x1,x2]^f ..." for a power of x_1 times chain commutators;
/// "1" when everything is trivial.
inline std::string chain_notation(i64 power, const std::vector<std::pair<int, i64>>& comms) {
  std::string out;
  auto add = [&](const std::string& base, i64 e) {
    if (e == 0) return;
    if (!out.empty()) out += ' ';
    out += base;
    if (e != 1) out += "^" + std::to_string(e);
  };
  add("x1", power);
  for (auto [j, e] : comms) add("[x" + std::to_string(j) + ",x" + std::to_string(j + 1) + "]", e);
  return out.empty() ? "1" : out;
}

}  // namespace detail

enum class StepTag { nielsen, class2_identity, unit_power, central_tweak, variable_permutation };

inline const char* to_string(StepTag t) {
  switch (t) {
    case StepTag::nielsen: return "nielsen";
    case StepTag::class2_identity: return "class2-identity";
    case StepTag::unit_power: return "unit-power";
    case StepTag::central_tweak: return "central-tweak";
    case StepTag::variable_permutation: return "variable-permutation";
  }
  return "?";
}

inline StepTag parse_step_tag(std::string_view s) {
  for (StepTag t : {StepTag::nielsen, StepTag::class2_identity, StepTag::unit_power, StepTag::central_tweak, StepTag::variable_permutation})
    if (s == to_string(t)) return t;
  throw ParseError("unknown certificate tag '" + std::string(s) + "'", 0);
}

struct CertificateStep {
  Substitution substitution;
  StepTag tag = StepTag::nielsen;
  std::string anchor;
};

struct Certificate {
  int rank = 1;
  PrimeContext context;
  Word source;
  Word target;
  std::vector<CertificateStep> steps;

  /// Steps of this certificate followed by those of `next`, whose source
  /// must be this certificate's target.
  Certificate then(const Certificate& next) const {
    if (next.source != target) throw std::invalid_argument("certificates do not chain");
    Certificate c = *this;
    c.target = next.target;
    c.steps.insert(c.steps.end(), next.steps.begin(), next.steps.end());
    return c;
  }

  std::string serialize() const {
    std::ostringstream out;
    out << "# rank=" << rank << " p=" << context.p << " E=" << context.precision << "\n";
    out << "source: " << render_word(source) << "\n";
    for (const auto& s : steps) out << to_string(s.tag) << '\t' << render_substitution(s.substitution) << '\t' << s.anchor << "\n";
    out << "target: " << render_word(target) << "\n";
    return out.str();
  }

  static Certificate parse(std::string_view text) {
    Certificate c;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& msg) { throw ParseError("certificate line " + std::to_string(lineno) + ": " + msg, lineno); };
    if (!std::getline(in, line)) fail("empty certificate");
    ++lineno;
    long long k = 0, p = 0, e = 0;
    if (std::sscanf(line.c_str(), "# rank=%lld p=%lld E=%lld", &k, &p, &e) != 3 || k < 1 || p < 2 || e < 1) fail("expected '# rank=K p=P E=E'");
    c.rank = static_cast<int>(k);
    c.context = PrimeContext{static_cast<i64>(p), static_cast<int>(e)};
    if (!std::getline(in, line) || line.rfind("source: ", 0) != 0) {
      ++lineno;
      fail("expected 'source: <word>'");
    }
    ++lineno;
    c.source = parse_word(std::string_view(line).substr(8), c.rank);
    bool have_target = false;
    while (std::getline(in, line)) {
      ++lineno;
      if (have_target) {
        if (!line.empty()) fail("content after target");
        continue;
      }
      if (line.rfind("target: ", 0) == 0) {
        c.target = parse_word(std::string_view(line).substr(8), c.rank);
        have_target = true;
        continue;
      }
      auto t1 = line.find('\t');
      auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
      if (t2 == std::string::npos) fail("expected '<tag>\\t<substitution>\\t<anchor>'");
      CertificateStep step;
      step.tag = parse_step_tag(std::string_view(line).substr(0, t1));
      step.substitution = parse_substitution(std::string_view(line).substr(t1 + 1, t2 - t1 - 1), c.rank, c.context);
      step.anchor = line.substr(t2 + 1);
      c.steps.push_back(std::move(step));
    }
    if (!have_target) fail("missing 'target: <word>'");
    return c;
  }
};

struct StepFailure {
  std::size_t index;  // == steps.size() for a final target mismatch
  std::string reason;
};

struct CertificateVerdict {
  bool passed = true;
  std::vector<StepFailure> failures;
  bool empirical_checked = false;
};

/// Algebraic replay: every step must have the shape its tag claims, unit
/// powers must be invertible mod p^E, and replaying the substitutions on the
/// source's class-2 form mod p^E must give the target's.
inline CertificateVerdict verify_certificate(const Certificate& cert) {
  CertificateVerdict v;
  auto fail = [&](std::size_t i, std::string why) {
    v.passed = false;
    v.failures.push_back({i, std::move(why)});
  };
  if (!is_prime(cert.context.p) || cert.context.precision < 1) {
    fail(0, "invalid prime context");
    return v;
  }
  const i64 q = cert.context.modulus();
  ModForm state = ModForm::of_word(cert.source.with_rank(cert.rank), q);
  for (std::size_t i = 0; i < cert.steps.size(); ++i) {
    const auto& step = cert.steps[i];
    const auto& s = step.substitution;
    if (s.rank != cert.rank) {
      fail(i, "substitution rank differs from certificate rank");
      continue;
    }
    const auto kind = s.kind;
    bool shape_ok = true;
    switch (step.tag) {
      case StepTag::variable_permutation:
        shape_ok = kind == SubstitutionKind::swap || kind == SubstitutionKind::cycle;
        break;
      case StepTag::nielsen:
        shape_ok = s.validity == Validity::free_automorphism && kind != SubstitutionKind::composite;
        break;
      case StepTag::unit_power: {
        auto moved = s.moved();
        if (moved.size() == 1) {
          const auto& syl = s.image(moved[0]).syllables();
          if (syl.size() == 1 && syl[0].gen == moved[0] && mod(syl[0].exp, cert.context.p) == 0) {
            fail(i, "power-by-unit exponent " + std::to_string(syl[0].exp) + " is not a unit mod " + std::to_string(cert.context.p));
            continue;
          }
        }
        shape_ok = kind == SubstitutionKind::power_by_unit || kind == SubstitutionKind::invert;
        break;
      }
      case StepTag::central_tweak:
        shape_ok = kind == SubstitutionKind::central_tweak;
        break;
      case StepTag::class2_identity:
        shape_ok = kind == SubstitutionKind::identity;
        break;
    }
    if (!shape_ok) {
      fail(i, std::string("substitution of kind ") + to_string(kind) + " does not match tag " + to_string(step.tag));
      continue;
    }
    state = state.apply(s);
  }
  if (state != ModForm::of_word(cert.target.with_rank(cert.rank), q))
    fail(cert.steps.size(), "replay gives " + state.to_string() + ", target is " + ModForm::of_word(cert.target.with_rank(cert.rank), q).to_string());
  return v;
}

// ---------------------------------------------------------------------------

struct ChainForm {
  int rank = 1;
  i64 p = 2;
  int precision = 1;
  std::vector<i64> t;  // t_0 .. t_{k-1}

  i64 modulus() const { return PrimeContext{p, precision}.modulus(); }

  /// x_1^{t_0} [x_1,x_2]^{t_1} ... [x_{k-1},x_k]^{t_{k-1}}
  Word word() const {
    Word w = Word::generator(rank, 1, t.at(0));
    for (int i = 1; i < rank; ++i)
      if (t[i] != 0) w *= Word::commutator(Word::generator(rank, i), Word::generator(rank, i + 1)).power(t[i]);
    return w;
  }

  std::string notation() const {
    std::vector<std::pair<int, i64>> comms;
    for (int i = 1; i < rank; ++i) comms.push_back({i, t[i]});
    return detail::chain_notation(t.at(0), comms);
  }

  /// Each t_i lies in {0, 1} or {p^s : 1 <= s < E}.
  bool in_shape() const {
    if (static_cast<int>(t.size()) != rank) return false;
    for (i64 x : t) {
      if (x == 0 || x == 1) continue;
      i64 pw = 1;
      bool ok = false;
      for (int s = 1; s < precision; ++s) {
        pw *= p;
        ok = ok || x == pw;
      }
      if (!ok) return false;
    }
    return true;
  }

  std::string to_string() const {
    std::string out = "t = (";
    for (std::size_t i = 0; i < t.size(); ++i) out += (i ? ", " : "") + std::to_string(t[i]);
    return out + ")";
  }
};

enum class VVariant { primitive, pure_commutator, power_with_tail };

inline const char* to_string(VVariant v) {
  switch (v) {
    case VVariant::primitive: return "primitive";
    case VVariant::pure_commutator: return "pure-commutator";
    case VVariant::power_with_tail: return "power-with-tail";
  }
  return "?";
}

/// x_1^{p^r} * prod over present j of [x_j, x_{j+1}]^{p^{s_j}}. The linked
/// part [x_1,x_2] ... [x_{l-1},x_l] ends at x_l = x_boundary; commutators
/// from index l on are pairwise disjoint. Pure-commutator forms have no
/// linked part (boundary 0).
struct VForm {
  int rank = 1;
  i64 p = 2;
  int precision = 1;
  VVariant variant = VVariant::primitive;
  std::optional<int> r;                // absent for pure-commutator
  int boundary = 1;                    // l, the last linked variable
  std::vector<std::optional<int>> s;   // s[j-1] = s_j, absent = commutator omitted

  int variables() const { return static_cast<int>(s.size()) + 1; }

  i64 ppow(int e) const { return static_cast<i64>(ipow(static_cast<u64>(p), static_cast<unsigned>(e))); }

  Word word() const {
    Word w(rank);
    if (variant == VVariant::primitive) return Word::generator(rank, 1);
    if (r) w = Word::generator(rank, 1, ppow(*r));
    for (std::size_t j = 0; j < s.size(); ++j)
      if (s[j]) w *= Word::commutator(Word::generator(rank, static_cast<int>(j) + 1), Word::generator(rank, static_cast<int>(j) + 2)).power(ppow(*s[j]));
    return w;
  }

  std::string notation() const {
    if (variant == VVariant::primitive) return "x1";
    std::vector<std::pair<int, i64>> comms;
    for (std::size_t j = 0; j < s.size(); ++j)
      if (s[j]) comms.push_back({static_cast<int>(j) + 1, ppow(*s[j])});
    return detail::chain_notation(r ? ppow(*r) : 0, comms);
  }

  /// Valuation ordering of a power-with-tail form (s_1 < ... < s_{l-1} < r
  /// and s_j < r for j >= l), pairwise disjointness of the commutators
  /// after the linked part, and range checks.
  bool satisfies_constraints() const {
    if (variables() > rank) return false;
    for (const auto& x : s)
      if (x && (*x < 0 || *x >= precision)) return false;
    auto tail_disjoint = [&](int from) {
      for (int j = std::max(from, 2); j <= static_cast<int>(s.size()); ++j)
        if (s[j - 1] && s[j - 2] && j - 1 >= from) return false;
      return true;
    };
    switch (variant) {
      case VVariant::primitive:
        return s.empty() && r.value_or(0) == 0;
      case VVariant::pure_commutator:
        return !r && boundary == 0 && tail_disjoint(1);
      case VVariant::power_with_tail: {
        if (!r || *r < 1 || *r >= precision || boundary < 1 || boundary > variables()) return false;
        for (const auto& x : s)
          if (x && *x >= *r) return false;
        int prev = -1;
        for (int j = 1; j < boundary; ++j) {
          if (!s[j - 1] || *s[j - 1] <= prev) return false;
          prev = *s[j - 1];
        }
        return tail_disjoint(boundary);
      }
    }
    return false;
  }

  std::string to_string() const {
    std::ostringstream out;
    out << to_string_variant();
    if (r) out << " r=" << *r;
    out << " l=" << boundary << " s=(";
    for (std::size_t j = 0; j < s.size(); ++j) out << (j ? ", " : "") << (s[j] ? std::to_string(*s[j]) : std::string("-"));
    out << ")";
    return out.str();
  }

 private:
  const char* to_string_variant() const { return nilword::to_string(variant); }
};

/// Exponents on [x_1,x_2], [x_3,x_4], ... in {0, 1, p^r}.
struct DisjointForm {
  int rank = 1;
  std::vector<i64> t;  // t[i] is the exponent of [x_{2i+1}, x_{2i+2}]

  Word word() const {
    Word w(rank);
    for (std::size_t i = 0; i < t.size(); ++i)
      if (t[i] != 0) w *= Word::commutator(Word::generator(rank, 2 * static_cast<int>(i) + 1), Word::generator(rank, 2 * static_cast<int>(i) + 2)).power(t[i]);
    return w;
  }
};

namespace detail {

inline PrimeContext checked_context(i64 p, int E) {
  if (!is_prime(p)) throw std::invalid_argument(std::to_string(p) + " is not prime");
  if (E < 1) throw std::invalid_argument("precision E must be at least 1");
  PrimeContext ctx{p, E};
  u64 q = 1;
  for (int i = 0; i < E; ++i) {
    q = checked_mul(q, static_cast<u64>(p));
    if (q > (u64{1} << 40)) throw std::invalid_argument("p^E too large");
  }
  return ctx;
}

/// Applies substitutions to a class-2 form mod p^E and records them.
class Rewriter {
 public:
  Rewriter(const Word& source, PrimeContext ctx)
      : ctx_(ctx), q_(ctx.modulus()), k_(source.rank()), state_(ModForm::of_word(source, q_)), source_(source) {}

  int rank() const { return k_; }
  i64 q() const { return q_; }
  i64 p() const { return ctx_.p; }
  int precision() const { return ctx_.precision; }
  PrimeContext context() const { return ctx_; }
  const ModForm& state() const { return state_; }

  i64 ppow(int e) const { return static_cast<i64>(ipow(static_cast<u64>(ctx_.p), static_cast<unsigned>(e))); }

  void apply(Substitution s, StepTag tag, std::string anchor) {
    state_ = state_.apply(s);
    steps_.push_back({std::move(s), tag, std::move(anchor)});
  }

  void swap(int i, int j, const std::string& anchor) {
    if (i != j) apply(Substitution::swap(k_, i, j), StepTag::variable_permutation, anchor);
  }

  /// x_i -> x_i x_j^c, c reduced to a short signed residue.
  void transvect(int i, int j, i64 c, const std::string& anchor) {
    c = signed_residue(c, q_);
    if (c != 0) apply(Substitution::right_multiply(k_, i, j, c), StepTag::nielsen, anchor);
  }

  /// x_1 -> x_1 [x_b, x_a]^m.
  void tweak(int a, int b, i64 m, const std::string& anchor) {
    apply(Substitution::central_tweak(k_, 1, b, a, m, ctx_), StepTag::central_tweak, anchor);
  }

  void unit_power(int i, i64 mu, const std::string& anchor) {
    mu = signed_residue(mu, q_);
    if (mu != 1) apply(Substitution::power_by_unit(k_, i, mu, ctx_), StepTag::unit_power, anchor);
  }

  Certificate finish(const Word& target) const {
    if (ModForm::of_word(target, q_) != state_)
      throw std::logic_error("canonicalizer state " + state_.to_string() + " does not match target " + render_word(target));
    return Certificate{k_, ctx_, source_, target, steps_};
  }

 private:
  PrimeContext ctx_;
  i64 q_;
  int k_;
  ModForm state_;
  Word source_;
  std::vector<CertificateStep> steps_;
};

/// Index with minimal p-adic valuation among nonzero entries (ties: first).
template <class Get>
std::optional<int> min_valuation_index(int from, int to, Get get, i64 p, int E) {
  std::optional<int> best;
  int best_v = E;
  for (int i = from; i <= to; ++i) {
    i64 x = get(i);
    if (x == 0) continue;
    int v = valuation(x, p, E);
    if (!best || v < best_v) {
      best = i;
      best_v = v;
    }
  }
  return best;
}

inline ChainForm run_chain(Rewriter& rw) {
  const int k = rw.rank();
  const i64 p = rw.p(), q = rw.q();
  const int E = rw.precision();

  // Abelianization: move the minimal-valuation exponent to x_1 and clear the
  // rest with x_1 -> x_1 x_j^c.
  if (auto piv = min_valuation_index(1, k, [&](int i) { return rw.state().a(i); }, p, E)) {
    rw.swap(1, *piv, "abelianization-pivot");
    auto [v, u] = split_valuation(rw.state().a(1), p);
    const i64 u_inv = inverse_mod(u, q);
    for (int j = 2; j <= k; ++j) {
      i64 aj = rw.state().a(j);
      if (aj == 0) continue;
      auto [vj, uj] = split_valuation(aj, p);
      rw.transvect(1, j, mod(-static_cast<i128>(uj) * u_inv % q * rw.ppow(vj - v), q), "abelianization-clear");
    }
  }

  // Commutator rows: in row m keep only [x_m, x_{m+1}], using
  // x_{m+1} -> x_{m+1} x_n^c to clear [x_m, x_n] for n > m+1.
  for (int m = 1; m <= k - 2; ++m) {
    auto piv = min_valuation_index(m + 1, k, [&](int n) { return rw.state().b(m, n); }, p, E);
    if (!piv) continue;
    const std::string row = "row-" + std::to_string(m);
    rw.swap(m + 1, *piv, row + "-pivot");
    auto [v, u] = split_valuation(rw.state().b(m, m + 1), p);
    const i64 u_inv = inverse_mod(u, q);
    for (int n = m + 2; n <= k; ++n) {
      i64 bn = rw.state().b(m, n);
      if (bn == 0) continue;
      auto [vn, un] = split_valuation(bn, p);
      rw.transvect(m + 1, n, mod(-static_cast<i128>(un) * u_inv % q * rw.ppow(vn - v), q), row + "-clear");
    }
  }

  // Unit normalization: x_i -> x_i^{mu_i} with mu_1 gamma_0 = 1 and
  // mu_i mu_{i+1} gamma_i = 1 turns every exponent into a pure p-power.
  std::vector<i64> mu(static_cast<std::size_t>(k) + 1, 1);
  if (i64 a1 = rw.state().a(1); a1 != 0) mu[1] = inverse_mod(split_valuation(a1, p).second, q);
  for (int i = 1; i < k; ++i) {
    i64 b = rw.state().b(i, i + 1);
    mu[i + 1] = b == 0 ? 1 : inverse_mod(mod(static_cast<i128>(split_valuation(b, p).second) * mu[i], q), q);
  }
  for (int i = 1; i <= k; ++i) rw.unit_power(i, mu[i], "unit-normalization");

  ChainForm c{k, p, E, std::vector<i64>(static_cast<std::size_t>(k), 0)};
  c.t[0] = rw.state().a(1);
  for (int i = 1; i < k; ++i) c.t[i] = rw.state().b(i, i + 1);
  return c;
}

struct Run {
  std::vector<int> vars;  // increasing
  std::vector<int> vals;  // vals[i] = valuation of [x_vars[i], x_vars[i+1]]
};

struct Pair {
  int a;
  int b;
  int val;
};

/// Splits chains of commutators into disjoint ones. With a power part
/// x_1^{p^r} (r set), commutators of valuation >= r are absorbed into x_1
/// and the chain through x_1 is only reduced until its valuations increase.
class ChainSplitter {
 public:
  ChainSplitter(Rewriter& rw, std::optional<int> r) : rw_(rw), r_(r) {}

  std::vector<Pair> disjoint;
  Run linked;  // chain starting at x_1 (power case only)

  int limit() const { return r_ ? *r_ : rw_.precision(); }

  /// [x_a, x_b]^{p^s} has reached the limit: it is already zero mod p^E,
  /// or the power part absorbs it via x_1 -> x_1 [x_b, x_a]^{p^{s-r}}.
  void absorb(int a, int b, int s) {
    if (s >= rw_.precision()) return;
    rw_.tweak(a, b, rw_.ppow(s - *r_), "power-absorb");
  }

  void split(Run run) {
    const std::size_t c = run.vals.size();
    if (c == 0) return;
    const auto& v = run.vars;
    const auto& s = run.vals;
    if (c == 1) {
      disjoint.push_back({v[0], v[1], s[0]});
      return;
    }
    if (s[c - 1] <= s[c - 2]) {
      split(case_one(run));
      return;
    }
    std::size_t l = c - 1;
    while (l > 0 && s[l - 1] < s[l]) --l;
    if (l == 0) {
      rw_.transvect(v[0], v[2], rw_.ppow(s[1] - s[0]), "disjoint-split");
      disjoint.push_back({v[0], v[1], s[0]});
      split(Run{{v.begin() + 2, v.end()}, {s.begin() + 2, s.end()}});
      return;
    }
    auto [left, right] = case_two(run, l);
    split(std::move(left));
    if (right) split(std::move(*right));
  }

  /// Reduces the chain through x_1 until s_1 < s_2 < ... holds.
  void link(Run run) {
    for (;;) {
      const std::size_t c = run.vals.size();
      bool increasing = true;
      for (std::size_t i = 1; i < c; ++i) increasing = increasing && run.vals[i - 1] < run.vals[i];
      if (increasing) {
        linked = std::move(run);
        return;
      }
      if (run.vals[c - 1] <= run.vals[c - 2]) {
        run = case_one(run);
        continue;
      }
      std::size_t l = c - 1;
      while (l > 0 && run.vals[l - 1] < run.vals[l]) --l;
      auto [left, right] = case_two(run, l);
      if (right) split(std::move(*right));
      run = std::move(left);
    }
  }

 private:
  /// s_{n-1} <= s_{n-2}: x_n -> x_n x_{n-2}^{p^{s_{n-2}-s_{n-1}}} removes
  /// [x_{n-2}, x_{n-1}] and leaves [x_{n-1}, x_n] disjoint. Returns the rest.
  Run case_one(const Run& run) {
    const auto& v = run.vars;
    const auto& s = run.vals;
    const std::size_t n = v.size(), c = s.size();
    rw_.transvect(v[n - 1], v[n - 3], rw_.ppow(s[c - 2] - s[c - 1]), "disjoint-case-1");
    disjoint.push_back({v[n - 2], v[n - 1], s[c - 1]});
    Run rest{{v.begin(), v.end() - 2}, {s.begin(), s.end() - 2}};
    if (rest.vars.size() == 1) rest.vals.clear();
    return rest;
  }

  /// l >= 1 with s_{l-1} >= s_l < s_{l+1} < ...: the two moves
  ///   x_l -> x_l x_{l+2}^{p^{s_{l+1}-s_l}},  x_{l+1} -> x_{l+1} x_{l-1}^{p^{s_{l-1}-s_l}}
  /// detach [x_l, x_{l+1}] and merge [x_{l-1}, x_{l+2}] with valuation
  /// s_{l-1} + s_{l+1} - s_l. Returns the remaining chain, split in two when
  /// the merged commutator reaches the limit.
  std::pair<Run, std::optional<Run>> case_two(const Run& run, std::size_t l) {
    const auto& v = run.vars;
    const auto& s = run.vals;
    rw_.transvect(v[l], v[l + 2], rw_.ppow(s[l + 1] - s[l]), "disjoint-case-2");
    rw_.transvect(v[l + 1], v[l - 1], rw_.ppow(s[l - 1] - s[l]), "disjoint-case-2");
    disjoint.push_back({v[l], v[l + 1], s[l]});
    const int merged = s[l - 1] + s[l + 1] - s[l];
    Run left{{v.begin(), v.begin() + static_cast<long>(l)}, {s.begin(), s.begin() + static_cast<long>(l) - 1}};
    Run right{{v.begin() + static_cast<long>(l) + 2, v.end()}, {s.begin() + static_cast<long>(l) + 2, s.end()}};
    if (merged >= limit()) {
      absorb(v[l - 1], v[l + 2], merged);
      if (right.vars.size() == 1) right.vals.clear();
      return {std::move(left), std::move(right)};
    }
    left.vars.insert(left.vars.end(), right.vars.begin(), right.vars.end());
    left.vals.push_back(merged);
    left.vals.insert(left.vals.end(), right.vals.begin(), right.vals.end());
    return {std::move(left), std::nullopt};
  }

  Rewriter& rw_;
  std::optional<int> r_;
};

/// Maximal runs of consecutive nonzero chain commutators [x_i, x_{i+1}].
inline std::vector<Run> chain_runs(const ModForm& st, i64 p, int E) {
  std::vector<Run> runs;
  const int k = st.rank();
  int i = 1;
  while (i < k) {
    if (st.b(i, i + 1) == 0) {
      ++i;
      continue;
    }
    Run run{{i}, {}};
    while (i < k && st.b(i, i + 1) != 0) {
      run.vals.push_back(valuation(st.b(i, i + 1), p, E));
      run.vars.push_back(++i);
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

/// Permutes variables (by swaps) so that dest[v] becomes the position of
/// the variable currently called v, for every v with a destination.
inline void relabel(Rewriter& rw, const std::vector<std::pair<int, int>>& moves) {
  const int k = rw.rank();
  std::vector<int> where(static_cast<std::size_t>(k) + 1), at(static_cast<std::size_t>(k) + 1);
  for (int i = 1; i <= k; ++i) where[i] = at[i] = i;
  auto sorted = moves;
  std::sort(sorted.begin(), sorted.end(), [](auto x, auto y) { return x.second < y.second; });
  for (auto [var, dest] : sorted) {
    const int cur = where[var];
    if (cur == dest) continue;
    rw.swap(dest, cur, "relabel");
    const int other = at[dest];
    std::swap(at[dest], at[cur]);
    where[var] = dest;
    where[other] = cur;
  }
}

inline void sort_pairs(std::vector<Pair>& d) {
  std::sort(d.begin(), d.end(), [](const Pair& x, const Pair& y) { return x.val != y.val ? x.val < y.val : x.a < y.a; });
}

}  // namespace detail

/// Rewrites w into chain form modulo p^E, recording every substitution.
inline std::pair<ChainForm, Certificate> chain_form(const Word& w, i64 p, int E) {
  detail::Rewriter rw(w, detail::checked_context(p, E));
  ChainForm c = detail::run_chain(rw);
  return {c, rw.finish(c.word())};
}

/// Same, starting from a class-2 form; the certificate source is its
/// reconstruction word with exponents reduced mod p^E.
inline std::pair<ChainForm, Certificate> chain_form(const Class2Form& f, i64 p, int E) {
  const i64 q = detail::checked_context(p, E).modulus();
  Class2Form reduced = f;
  for (auto& a : reduced.abelian) a = ((a % q) + q) % q;
  for (auto it = reduced.beta.begin(); it != reduced.beta.end();) {
    it->second = ((it->second % q) + q) % q;
    it = it->second == 0 ? reduced.beta.erase(it) : std::next(it);
  }
  return chain_form(reduced.reconstruction(), p, E);
}

/// Splitting of [x_1,x_2]^{p^{s_1}} ... [x_{n-1},x_n]^{p^{s_{n-1}}}
/// into disjoint commutators [x_1,x_2]^{t_1} [x_3,x_4]^{t_3} ... with
/// t in {0, 1, p^r}; ordered by increasing valuation.
inline std::pair<DisjointForm, Certificate> disjoint_reduce(const std::vector<int>& valuations, i64 p, int E) {
  const auto ctx = detail::checked_context(p, E);
  const int n = static_cast<int>(valuations.size()) + 1;
  Word source(n);
  for (int j = 1; j < n; ++j) {
    if (valuations[j - 1] < 0) throw std::invalid_argument("valuations must be nonnegative");
    if (valuations[j - 1] >= E) continue;
    source *= Word::commutator(Word::generator(n, j), Word::generator(n, j + 1)).power(ctx.modulus() / static_cast<i64>(ipow(static_cast<u64>(p), static_cast<unsigned>(E - valuations[j - 1]))));
  }
  detail::Rewriter rw(source, ctx);
  detail::ChainSplitter splitter(rw, std::nullopt);
  for (auto& run : detail::chain_runs(rw.state(), p, E)) splitter.split(run);
  detail::sort_pairs(splitter.disjoint);
  std::vector<std::pair<int, int>> moves;
  DisjointForm form{n, std::vector<i64>(static_cast<std::size_t>(n / 2), 0)};
  for (std::size_t i = 0; i < splitter.disjoint.size(); ++i) {
    moves.push_back({splitter.disjoint[i].a, 2 * static_cast<int>(i) + 1});
    moves.push_back({splitter.disjoint[i].b, 2 * static_cast<int>(i) + 2});
    form.t[i] = rw.ppow(splitter.disjoint[i].val);
  }
  detail::relabel(rw, moves);
  return {form, rw.finish(form.word())};
}

/// Rewrites a chain form into v-form: primitive (automorphic to x_1),
/// pure-commutator (disjoint commutators), or power-with-tail.
inline std::pair<VForm, Certificate> v_form(const ChainForm& chain) {
  if (!chain.in_shape()) throw std::invalid_argument("chain form out of shape: " + chain.to_string());
  const auto ctx = detail::checked_context(chain.p, chain.precision);
  const int k = chain.rank;
  const i64 p = chain.p;
  const int E = chain.precision;
  detail::Rewriter rw(chain.word(), ctx);
  VForm vf;
  vf.rank = k;
  vf.p = p;
  vf.precision = E;

  if (chain.t[0] == 0) {
    detail::ChainSplitter splitter(rw, std::nullopt);
    for (auto& run : detail::chain_runs(rw.state(), p, E)) splitter.split(run);
    detail::sort_pairs(splitter.disjoint);
    std::vector<std::pair<int, int>> moves;
    vf.variant = VVariant::pure_commutator;
    vf.boundary = 0;
    for (std::size_t i = 0; i < splitter.disjoint.size(); ++i) {
      moves.push_back({splitter.disjoint[i].a, 2 * static_cast<int>(i) + 1});
      moves.push_back({splitter.disjoint[i].b, 2 * static_cast<int>(i) + 2});
      vf.s.resize(2 * i + 1);
      vf.s[2 * i] = splitter.disjoint[i].val;
    }
    detail::relabel(rw, moves);
    return {vf, rw.finish(vf.word())};
  }

  const int r = valuation(chain.t[0], p, E);
  // Absorb every chain commutator whose valuation reaches r.
  for (int j = 1; j < k; ++j) {
    if (chain.t[j] == 0) continue;
    const int sj = valuation(chain.t[j], p, E);
    if (sj >= r) rw.tweak(j, j + 1, rw.ppow(sj - r), "power-absorb");
  }
  if (r == 0) {
    vf.variant = VVariant::primitive;
    vf.r = 0;
    return {vf, rw.finish(vf.word())};
  }

  detail::ChainSplitter splitter(rw, r);
  for (auto& run : detail::chain_runs(rw.state(), p, E)) {
    if (run.vars.front() == 1)
      splitter.link(run);
    else
      splitter.split(run);
  }
  detail::sort_pairs(splitter.disjoint);
  const int m = splitter.linked.vars.empty() ? 0 : static_cast<int>(splitter.linked.vals.size());

  std::vector<std::pair<int, int>> moves;
  for (int i = 0; i <= m && m > 0; ++i) moves.push_back({splitter.linked.vars[i], i + 1});
  vf.variant = VVariant::power_with_tail;
  vf.r = r;
  for (int j = 0; j < m; ++j) vf.s.push_back(splitter.linked.vals[j]);
  for (std::size_t i = 0; i < splitter.disjoint.size(); ++i) {
    const int pos = m + 2 + 2 * static_cast<int>(i);  // right after x_l, l = m + 1
    moves.push_back({splitter.disjoint[i].a, pos});
    moves.push_back({splitter.disjoint[i].b, pos + 1});
    vf.s.resize(static_cast<std::size_t>(pos));
    vf.s[pos - 1] = splitter.disjoint[i].val;
  }
  vf.boundary = m + 1;
  detail::relabel(rw, moves);
  return {vf, rw.finish(vf.word())};
}

struct Canonicalization {
  Class2Form form;
  ChainForm chain;
  Certificate chain_certificate;
  VForm vform;
  Certificate v_certificate;

  Certificate full_certificate() const { return chain_certificate.then(v_certificate); }
};

inline Canonicalization canonicalize(const Word& w, i64 p, int E) {
  auto [chain, cc] = chain_form(w, p, E);
  auto [vf, vc] = v_form(chain);
  return {class2_normal_form(w), chain, cc, vf, vc};
}

}  // namespace nilword
