#pragma once

// Images of words in the free nilpotent group of class 2.
//
// Every word w in F_k satisfies, modulo the third term of the lower central
// series,
//     w = x_1^{a_1} ... x_k^{a_k} * prod_{m<n} [x_m, x_n]^{beta_{m,n}}
// and the pair (a, beta) determines the word map on every group of class 2.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "nilword/arith.hpp"
#include "nilword/word.hpp"

namespace nilword {

using BigInt = boost::multiprecision::cpp_int;

struct Class2Form {
  int rank = 1;
  std::vector<BigInt> abelian;                 // a_i, index i-1
  std::map<std::pair<int, int>, BigInt> beta;  // (m,n) with m < n, nonzero entries only

  explicit Class2Form(int k = 1) : rank(k), abelian(static_cast<std::size_t>(k)) {}

  BigInt beta_at(int m, int n) const {
    auto it = beta.find({m, n});
    return it == beta.end() ? BigInt(0) : it->second;
  }

  void add_beta(int m, int n, const BigInt& v) {
    if (v == 0) return;
    auto& slot = beta[{m, n}];
    slot += v;
    if (slot == 0) beta.erase({m, n});
  }

  /// x_1^{a_1}...x_k^{a_k} * prod [x_m,x_n]^{beta}; entries must fit in i64.
  Word reconstruction() const {
    Word w(rank);
    for (int i = 1; i <= rank; ++i) w *= Word::generator(rank, i, static_cast<i64>(abelian[i - 1]));
    for (const auto& [key, v] : beta)
      w *= Word::commutator(Word::generator(rank, key.first), Word::generator(rank, key.second)).power(static_cast<i64>(v));
    return w;
  }

  std::string to_string() const {
    std::string out = "a = (";
    for (int i = 0; i < rank; ++i) out += (i ? ", " : "") + abelian[i].str();
    out += ")";
    for (const auto& [key, v] : beta)
      out += ", beta[" + std::to_string(key.first) + "," + std::to_string(key.second) + "] = " + v.str();
    return out;
  }

  friend bool operator==(const Class2Form&, const Class2Form&) = default;
};

/// Left-to-right collection. Appending x_g^e to x_1^{a_1}...x_k^{a_k}
/// moves x_g^e past x_n^{a_n} for n > g, and x_n^{a} x_g^{e} = x_g^{e} x_n^{a} [x_g,x_n]^{-ae}.
inline Class2Form class2_normal_form(const Word& w) {
  Class2Form f(w.rank());
  for (const auto& s : w.syllables()) {
    for (int n = s.gen + 1; n <= w.rank(); ++n) {
      const BigInt& an = f.abelian[n - 1];
      if (an != 0) f.add_beta(s.gen, n, -an * s.exp);
    }
    f.abelian[s.gen - 1] += s.exp;
  }
  return f;
}

/// The same data reduced modulo q = p^E, stored densely. Arithmetic follows
/// the class-2 group law:
///   (a,B)(a',B')   = (a+a', B+B' - a_n a'_m)
///   (a,B)^e        = (e a, e B - C(e,2) a_m a_n)
///   [(a,B),(a',B')] = (0, a_m a'_n - a_n a'_m)
/// Binomials are taken on the exact exponent before reduction, so the
/// result only depends on the word map on groups with exponent dividing q.
class ModForm {
 public:
  ModForm(int rank, i64 q) : rank_(rank), q_(q), a_(static_cast<std::size_t>(rank)), b_(static_cast<std::size_t>(rank * rank)) {}

  static ModForm from(const Class2Form& f, i64 q) {
    ModForm m(f.rank, q);
    for (int i = 1; i <= f.rank; ++i) m.a_[i - 1] = reduce_big(f.abelian[i - 1], q);
    for (const auto& [key, v] : f.beta) m.b(key.first, key.second) = reduce_big(v, q);
    return m;
  }

  static ModForm of_word(const Word& w, i64 q) { return from(class2_normal_form(w), q); }

  static ModForm generator(int rank, i64 q, int i) {
    ModForm m(rank, q);
    m.a_[i - 1] = mod(1, q);
    return m;
  }

  int rank() const noexcept { return rank_; }
  i64 modulus() const noexcept { return q_; }

  i64 a(int i) const { return a_[i - 1]; }
  i64& a(int i) { return a_[i - 1]; }
  /// beta_{m,n}, m < n.
  i64 b(int m, int n) const { return b_[idx(m, n)]; }
  i64& b(int m, int n) { return b_[idx(m, n)]; }

  ModForm operator*(const ModForm& o) const {
    ModForm r(rank_, q_);
    for (int i = 1; i <= rank_; ++i) r.a(i) = mod(static_cast<i128>(a(i)) + o.a(i), q_);
    for (int m = 1; m <= rank_; ++m)
      for (int n = m + 1; n <= rank_; ++n)
        r.b(m, n) = mod(static_cast<i128>(b(m, n)) + o.b(m, n) - static_cast<i128>(a(n)) * o.a(m), q_);
    return r;
  }

  ModForm pow(i64 e) const {
    ModForm r(rank_, q_);
    const i64 binom = mod(static_cast<i128>(e) * (static_cast<i128>(e) - 1) / 2, q_);
    const i64 er = mod(e, q_);
    for (int i = 1; i <= rank_; ++i) r.a(i) = mod(static_cast<i128>(er) * a(i), q_);
    for (int m = 1; m <= rank_; ++m)
      for (int n = m + 1; n <= rank_; ++n) {
        i128 t = static_cast<i128>(er) * b(m, n) - static_cast<i128>(binom) * mod(static_cast<i128>(a(m)) * a(n), q_);
        r.b(m, n) = mod(t, q_);
      }
    return r;
  }

  static ModForm commutator(const ModForm& u, const ModForm& v) {
    ModForm r(u.rank_, u.q_);
    for (int m = 1; m <= u.rank_; ++m)
      for (int n = m + 1; n <= u.rank_; ++n)
        r.b(m, n) = mod(static_cast<i128>(u.a(m)) * v.a(n) - static_cast<i128>(u.a(n)) * v.a(m), u.q_);
    return r;
  }

  /// Image of this word map under a substitution: prod phi(x_i)^{a_i} * prod [phi(x_m),phi(x_n)]^{b_mn}.
  ModForm apply(const Substitution& s) const {
    if (s.rank != rank_) throw std::invalid_argument("rank mismatch applying substitution");
    std::vector<ModForm> img;
    img.reserve(static_cast<std::size_t>(rank_));
    for (int i = 1; i <= rank_; ++i) img.push_back(of_word(s.image(i), q_));
    ModForm r(rank_, q_);
    for (int i = 1; i <= rank_; ++i)
      if (a(i) != 0) r = r * img[i - 1].pow(a(i));
    for (int m = 1; m <= rank_; ++m)
      for (int n = m + 1; n <= rank_; ++n)
        if (b(m, n) != 0) {
          ModForm c = commutator(img[m - 1], img[n - 1]);
          for (int x = 1; x <= rank_; ++x)
            for (int y = x + 1; y <= rank_; ++y)
              r.b(x, y) = mod(static_cast<i128>(r.b(x, y)) + static_cast<i128>(c.b(x, y)) * b(m, n), q_);
        }
    return r;
  }

  std::string to_string() const {
    std::string out = "a = (";
    for (int i = 1; i <= rank_; ++i) out += (i > 1 ? ", " : "") + std::to_string(a(i));
    out += ")";
    for (int m = 1; m <= rank_; ++m)
      for (int n = m + 1; n <= rank_; ++n)
        if (b(m, n) != 0) out += ", beta[" + std::to_string(m) + "," + std::to_string(n) + "] = " + std::to_string(b(m, n));
    return out + " mod " + std::to_string(q_);
  }

  friend bool operator==(const ModForm&, const ModForm&) = default;

 private:
  static i64 reduce_big(const BigInt& v, i64 q) {
    BigInt r = v % q;
    if (r < 0) r += q;
    return static_cast<i64>(r);
  }

  std::size_t idx(int m, int n) const { return static_cast<std::size_t>((m - 1) * rank_ + (n - 1)); }

  int rank_;
  i64 q_;
  std::vector<i64> a_;
  std::vector<i64> b_;
};

}  // namespace nilword
