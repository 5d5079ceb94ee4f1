#pragma once

// Free-group words, the textual word grammar, and substitutions
// (endomorphisms of F_k given by generator images).

#include <algorithm>
#include <cctype>
#include <compare>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nilword/arith.hpp"
#include "nilword/error.hpp"

namespace nilword {

struct Syllable {
  int gen;  // 1-based
  i64 exp;  // nonzero once inside a Word

  friend bool operator==(const Syllable&, const Syllable&) = default;
};

/// A freely reduced word in F_k with an explicit ambient rank k.
class Word {
 public:
  explicit Word(int rank = 1) : rank_(rank) {
    if (rank < 1) throw std::invalid_argument("word rank must be positive");
  }

  Word(int rank, const std::vector<Syllable>& syllables) : Word(rank) {
    for (const auto& s : syllables) push(s);
  }

  static Word generator(int rank, int gen, i64 exp = 1) { return Word(rank, {{gen, exp}}); }

  int rank() const noexcept { return rank_; }
  const std::vector<Syllable>& syllables() const noexcept { return syllables_; }
  bool is_identity() const noexcept { return syllables_.empty(); }
  std::size_t length() const noexcept { return syllables_.size(); }

  /// Largest generator index that occurs (0 for the identity).
  int max_generator() const {
    int m = 0;
    for (const auto& s : syllables_) m = std::max(m, s.gen);
    return m;
  }

  /// Same letters viewed in a larger (or equal) ambient rank.
  Word with_rank(int rank) const {
    if (rank < max_generator()) throw std::invalid_argument("rank smaller than a generator in use");
    Word w(rank);
    w.syllables_ = syllables_;
    return w;
  }

  Word inverse() const {
    Word w(rank_);
    for (auto it = syllables_.rbegin(); it != syllables_.rend(); ++it) w.syllables_.push_back({it->gen, -it->exp});
    return w;
  }

  Word& operator*=(const Word& rhs) {
    rank_ = std::max(rank_, rhs.rank_);
    for (const auto& s : rhs.syllables_) push(s);
    return *this;
  }

  friend Word operator*(Word lhs, const Word& rhs) { return lhs *= rhs; }

  Word power(i64 n) const {
    if (n < 0) return inverse().power(-n);
    Word w(rank_);
    if (n == 0 || is_identity()) return w;
    if (syllables_.size() == 1) return Word(rank_, {{syllables_[0].gen, checked_mul(syllables_[0].exp, n)}});
    for (i64 i = 0; i < n; ++i) w *= *this;
    return w;
  }

  /// Free-group commutator u v u^-1 v^-1.
  static Word commutator(const Word& u, const Word& v) { return u * v * u.inverse() * v.inverse(); }

  /// Signed count of x_gen letters.
  i64 exponent_sum(int gen) const {
    i64 s = 0;
    for (const auto& syl : syllables_)
      if (syl.gen == gen) s = checked_add(s, syl.exp);
    return s;
  }

  friend bool operator==(const Word&, const Word&) = default;

 private:
  void push(Syllable s) {
    if (s.gen < 1 || s.gen > rank_) throw std::invalid_argument("generator index out of range");
    if (s.exp == 0) return;
    if (!syllables_.empty() && syllables_.back().gen == s.gen) {
      i64 e = checked_add(syllables_.back().exp, s.exp);
      if (e == 0)
        syllables_.pop_back();
      else
        syllables_.back().exp = e;
    } else {
      syllables_.push_back(s);
    }
  }

  int rank_;
  std::vector<Syllable> syllables_;
};

/// Reduces an arbitrary syllable sequence (zero exponents and repeated
/// generators allowed).
inline Word reduce(int rank, const std::vector<Syllable>& syllables) { return Word(rank, syllables); }

namespace detail {

class WordParser {
 public:
  explicit WordParser(std::string_view text) : text_(text) {}

  Word parse(std::optional<int> rank) {
    // Parse with a provisional huge rank, then narrow.
    constexpr int kWide = 1 << 20;
    Word w = parse_word(kWide);
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    int needed = std::max(max_index_, 1);
    int r = rank.value_or(needed);
    if (r < 1) throw ParseError("rank must be positive", 0);
    if (max_index_ > r) throw ParseError("generator x" + std::to_string(max_index_) + " exceeds rank " + std::to_string(r), max_pos_);
    return w.with_rank(r);
  }

 private:
  Word parse_word(int rank) {
    Word w(rank);
    for (;;) {
      skip_space();
      if (pos_ >= text_.size() || text_[pos_] == ',' || text_[pos_] == ']') return w;
      w *= parse_factor(rank);
    }
  }

  Word parse_factor(int rank) {
    Word atom = parse_atom(rank);
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '^') {
      ++pos_;
      skip_space();
      return atom.power(parse_int());
    }
    return atom;
  }

  Word parse_atom(int rank) {
    skip_space();
    if (pos_ >= text_.size()) fail("expected generator or '['");
    char c = text_[pos_];
    if (c == 'x') {
      std::size_t at = pos_;
      ++pos_;
      i64 idx = parse_posint();
      if (idx == 0) throw ParseError("generator index 0", at);
      if (idx > rank) throw ParseError("generator index too large", at);
      if (idx > max_index_) {
        max_index_ = static_cast<int>(idx);
        max_pos_ = at;
      }
      return Word::generator(rank, static_cast<int>(idx));
    }
    if (c == '[') {
      ++pos_;
      Word u = parse_word(rank);
      expect(',');
      Word v = parse_word(rank);
      expect(']');
      return Word::commutator(u, v);
    }
    fail("expected generator or '['");
  }

  i64 parse_int() {
    bool neg = false;
    if (pos_ < text_.size() && text_[pos_] == '-') {
      neg = true;
      ++pos_;
    }
    i64 v = parse_posint();
    return neg ? -v : v;
  }

  i64 parse_posint() {
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) fail("expected digit");
    i64 v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      if (v > (std::numeric_limits<i64>::max() - 9) / 10) fail("integer too large");
      v = v * 10 + (text_[pos_] - '0');
      ++pos_;
    }
    return v;
  }

  void expect(char c) {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  std::string_view text_;
  std::size_t pos_ = 0;
  int max_index_ = 0;
  std::size_t max_pos_ = 0;
};

}  // namespace detail

/// Parses the word grammar
///   word := { factor }   factor := atom [ "^" int ]   atom := gen | "[" word "," word "]"
/// Brackets expand to u v u^-1 v^-1. Rank defaults to the largest index used.
inline Word parse_word(std::string_view text, std::optional<int> rank = std::nullopt) {
  return detail::WordParser(text).parse(rank);
}

/// Syllables separated by single spaces, "^1" omitted. Identity renders as "".
inline std::string render_word(const Word& w) {
  std::string out;
  for (const auto& s : w.syllables()) {
    if (!out.empty()) out += ' ';
    out += 'x';
    out += std::to_string(s.gen);
    if (s.exp != 1) {
      out += '^';
      out += std::to_string(s.exp);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Substitutions

enum class SubstitutionKind { identity, swap, cycle, invert, right_multiply, power_by_unit, central_tweak, composite };
enum class Validity { free_automorphism, fkg_automorphism, endomorphism };

inline const char* to_string(SubstitutionKind k) {
  switch (k) {
    case SubstitutionKind::identity: return "identity";
    case SubstitutionKind::swap: return "swap";
    case SubstitutionKind::cycle: return "cycle";
    case SubstitutionKind::invert: return "invert";
    case SubstitutionKind::right_multiply: return "right-multiply";
    case SubstitutionKind::power_by_unit: return "power-by-unit";
    case SubstitutionKind::central_tweak: return "central-tweak";
    case SubstitutionKind::composite: return "composite";
  }
  return "?";
}

inline const char* to_string(Validity v) {
  switch (v) {
    case Validity::free_automorphism: return "free-automorphism";
    case Validity::fkg_automorphism: return "FkG-automorphism";
    case Validity::endomorphism: return "endomorphism";
  }
  return "?";
}

/// Modulus p^E that an F_k(G)-automorphism is valid for (exp(G) | p^E).
struct PrimeContext {
  i64 p = 2;
  int precision = 1;

  i64 modulus() const { return static_cast<i64>(ipow(static_cast<u64>(p), static_cast<unsigned>(precision))); }
  friend bool operator==(const PrimeContext&, const PrimeContext&) = default;
};

struct Substitution {
  int rank = 1;
  std::vector<Word> images;          // images[i] is the image of x_{i+1}
  std::vector<Word> inverse_images;  // empty when no inverse is known
  SubstitutionKind kind = SubstitutionKind::identity;
  Validity validity = Validity::free_automorphism;
  std::optional<PrimeContext> context;

  const Word& image(int gen) const { return images.at(static_cast<std::size_t>(gen - 1)); }

  /// Generators whose image differs from themselves, ascending.
  std::vector<int> moved() const {
    std::vector<int> out;
    for (int i = 1; i <= rank; ++i)
      if (image(i) != Word::generator(rank, i)) out.push_back(i);
    return out;
  }

  Substitution inverse() const {
    if (inverse_images.empty()) throw std::logic_error("substitution has no stored inverse");
    Substitution s = *this;
    std::swap(s.images, s.inverse_images);
    return s;
  }

  static Substitution identity(int rank) {
    Substitution s;
    s.rank = rank;
    for (int i = 1; i <= rank; ++i) s.images.push_back(Word::generator(rank, i));
    s.inverse_images = s.images;
    return s;
  }

  static Substitution swap(int rank, int i, int j) {
    check_index(rank, i);
    check_index(rank, j);
    if (i == j) throw std::invalid_argument("swap needs two distinct generators");
    Substitution s = identity(rank);
    s.images[i - 1] = Word::generator(rank, j);
    s.images[j - 1] = Word::generator(rank, i);
    s.inverse_images = s.images;
    s.kind = SubstitutionKind::swap;
    return s;
  }

  /// x_1 -> x_2 -> ... -> x_k -> x_1.
  static Substitution cycle(int rank) {
    Substitution s = identity(rank);
    for (int i = 1; i <= rank; ++i) {
      s.images[i - 1] = Word::generator(rank, i % rank + 1);
      s.inverse_images[i - 1] = Word::generator(rank, (i + rank - 2) % rank + 1);
    }
    s.kind = rank == 1 ? SubstitutionKind::identity : SubstitutionKind::cycle;
    return s;
  }

  static Substitution invert(int rank, int i) {
    check_index(rank, i);
    Substitution s = identity(rank);
    s.images[i - 1] = Word::generator(rank, i, -1);
    s.inverse_images = s.images;
    s.kind = SubstitutionKind::invert;
    return s;
  }

  /// x_i -> x_i x_j^c (a product of elementary Nielsen moves).
  static Substitution right_multiply(int rank, int i, int j, i64 c = 1) {
    check_index(rank, i);
    check_index(rank, j);
    if (i == j) throw std::invalid_argument("right-multiply needs distinct generators");
    if (c == 0) throw std::invalid_argument("right-multiply by the zero power");
    Substitution s = identity(rank);
    s.images[i - 1] = Word(rank, {{i, 1}, {j, c}});
    s.inverse_images[i - 1] = Word(rank, {{i, 1}, {j, -c}});
    s.kind = SubstitutionKind::right_multiply;
    return s;
  }

  /// x_i -> x_i^gamma with gamma a unit modulo p^E.
  static Substitution power_by_unit(int rank, int i, i64 gamma, PrimeContext ctx) {
    check_index(rank, i);
    if (!is_prime(ctx.p) || ctx.precision < 1) throw std::invalid_argument("invalid prime context");
    if (mod(gamma, ctx.p) == 0) throw std::invalid_argument("power-by-unit exponent " + std::to_string(gamma) + " is not a unit mod " + std::to_string(ctx.p));
    Substitution s = identity(rank);
    s.images[i - 1] = Word::generator(rank, i, gamma);
    s.inverse_images[i - 1] = Word::generator(rank, i, inverse_mod(gamma, ctx.modulus()));
    s.kind = SubstitutionKind::power_by_unit;
    s.validity = Validity::fkg_automorphism;
    s.context = ctx;
    return s;
  }

  /// x_i -> x_i [x_a, x_b]^m.
  static Substitution central_tweak(int rank, int i, int a, int b, i64 m, PrimeContext ctx) {
    check_index(rank, i);
    check_index(rank, a);
    check_index(rank, b);
    if (a == b) throw std::invalid_argument("central tweak needs a nontrivial commutator");
    Substitution s = identity(rank);
    Word c = Word::commutator(Word::generator(rank, a), Word::generator(rank, b));
    s.images[i - 1] = Word::generator(rank, i) * c.power(m);
    s.inverse_images[i - 1] = Word::generator(rank, i) * c.power(-m);
    s.kind = SubstitutionKind::central_tweak;
    s.validity = Validity::fkg_automorphism;
    s.context = ctx;
    return s;
  }

  /// Rebuilds kind, validity and inverse data from bare images by matching
  /// them against every known shape. Unrecognised images become a
  /// composite endomorphism without inverse.
  static Substitution recognize(int rank, const std::vector<Word>& images, std::optional<PrimeContext> ctx);

 private:
  static void check_index(int rank, int i) {
    if (i < 1 || i > rank) throw std::invalid_argument("generator index " + std::to_string(i) + " out of range 1.." + std::to_string(rank));
  }
};

/// Replaces every generator occurrence by its image and freely reduces.
inline Word substitute(const Word& w, const Substitution& s) {
  if (w.rank() != s.rank) throw std::invalid_argument("rank mismatch between word and substitution");
  Word out(s.rank);
  for (const auto& syl : w.syllables()) out *= s.image(syl.gen).power(syl.exp);
  return out;
}

/// The substitution equal to applying `first` and then `second`.
inline Substitution compose(const Substitution& first, const Substitution& second) {
  if (first.rank != second.rank) throw std::invalid_argument("rank mismatch in composition");
  Substitution s;
  s.rank = first.rank;
  for (const auto& img : first.images) s.images.push_back(substitute(img, second));
  if (!first.inverse_images.empty() && !second.inverse_images.empty()) {
    Substitution inv2 = second.inverse();
    Substitution inv1 = first.inverse();
    for (const auto& img : inv2.images) s.inverse_images.push_back(substitute(img, inv1));
  }
  s.kind = SubstitutionKind::composite;
  bool both_free = first.validity == Validity::free_automorphism && second.validity == Validity::free_automorphism;
  bool invertible = first.validity != Validity::endomorphism && second.validity != Validity::endomorphism;
  s.validity = both_free ? Validity::free_automorphism : invertible ? Validity::fkg_automorphism : Validity::endomorphism;
  s.context = first.context ? first.context : second.context;
  return s;
}

inline Substitution Substitution::recognize(int rank, const std::vector<Word>& images, std::optional<PrimeContext> ctx) {
  if (static_cast<int>(images.size()) != rank) throw std::invalid_argument("need one image per generator");
  for (const auto& w : images)
    if (w.rank() != rank) throw std::invalid_argument("image rank mismatch");
  auto matches = [&](const Substitution& cand) { return cand.images == images; };

  Substitution id = identity(rank);
  std::vector<int> moved;
  for (int i = 1; i <= rank; ++i)
    if (images[i - 1] != id.images[i - 1]) moved.push_back(i);
  if (moved.empty()) return id;

  if (moved.size() == 2) {
    Substitution cand = swap(rank, moved[0], moved[1]);
    if (matches(cand)) return cand;
  }
  if (static_cast<int>(moved.size()) == rank && rank > 1) {
    Substitution cand = cycle(rank);
    if (matches(cand)) return cand;
  }
  if (moved.size() == 1) {
    const int i = moved[0];
    const Word& img = images[i - 1];
    const auto& syl = img.syllables();
    if (syl.size() == 1 && syl[0].gen == i) {
      if (syl[0].exp == -1) return invert(rank, i);
      if (ctx && mod(syl[0].exp, ctx->p) != 0) return power_by_unit(rank, i, syl[0].exp, *ctx);
    }
    if (syl.size() == 2 && syl[0].gen == i && syl[0].exp == 1) return right_multiply(rank, i, syl[1].gen, syl[1].exp);
    // x_i [x_a, x_b]^m : the tail x_i^-1 * img must be a power of a single
    // generator commutator. Try every orientation/exponent consistent with
    // its exponent sums being zero.
    Word tail = Word::generator(rank, i, -1) * img;
    bool balanced = true;
    for (int g = 1; g <= rank; ++g) balanced = balanced && tail.exponent_sum(g) == 0;
    if (balanced && !tail.is_identity()) {
      for (int a = 1; a <= rank; ++a) {
        for (int b = 1; b <= rank; ++b) {
          if (a == b) continue;
          Word c = Word::commutator(Word::generator(rank, a), Word::generator(rank, b));
          // |m| is bounded by the number of syllables of the tail.
          i64 bound = static_cast<i64>(tail.length());
          for (i64 m : {bound / 4, -(bound / 4), bound / 4 + 1, -(bound / 4 + 1)}) {
            if (m == 0) continue;
            if (c.power(m) == tail) return central_tweak(rank, i, a, b, m, ctx.value_or(PrimeContext{}));
          }
        }
      }
    }
  }
  Substitution s;
  s.rank = rank;
  s.images = images;
  s.kind = SubstitutionKind::composite;
  s.validity = Validity::endomorphism;
  s.context = ctx;
  return s;
}

/// Parameters for make_nielsen; which fields matter depends on the kind.
struct NielsenParams {
  int i = 1;
  int j = 2;
  i64 exponent = 1;
  int a = 1;
  int b = 2;
  std::optional<PrimeContext> context;
};

inline Substitution make_nielsen(SubstitutionKind kind, const NielsenParams& params, int rank) {
  switch (kind) {
    case SubstitutionKind::identity: return Substitution::identity(rank);
    case SubstitutionKind::swap: return Substitution::swap(rank, params.i, params.j);
    case SubstitutionKind::cycle: return Substitution::cycle(rank);
    case SubstitutionKind::invert: return Substitution::invert(rank, params.i);
    case SubstitutionKind::right_multiply: return Substitution::right_multiply(rank, params.i, params.j, params.exponent);
    case SubstitutionKind::power_by_unit:
      if (!params.context) throw std::invalid_argument("power-by-unit needs a (p, E) context");
      return Substitution::power_by_unit(rank, params.i, params.exponent, *params.context);
    case SubstitutionKind::central_tweak:
      if (!params.context) throw std::invalid_argument("central-tweak needs a (p, E) context");
      return Substitution::central_tweak(rank, params.i, params.a, params.b, params.exponent, *params.context);
    case SubstitutionKind::composite: break;
  }
  throw std::invalid_argument("make_nielsen: unsupported kind");
}

/// "x1->x1 x2^-1; x3->x3^2" listing moved generators only ("id" if none).
inline std::string render_substitution(const Substitution& s) {
  std::string out;
  for (int g : s.moved()) {
    if (!out.empty()) out += "; ";
    out += "x" + std::to_string(g) + "->" + render_word(s.image(g));
  }
  return out.empty() ? "id" : out;
}

inline Substitution parse_substitution(std::string_view text, int rank, std::optional<PrimeContext> ctx) {
  std::vector<Word> images;
  for (int i = 1; i <= rank; ++i) images.push_back(Word::generator(rank, i));
  if (text != "id") {
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find(';', start);
      std::string_view item = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
      std::size_t arrow = item.find("->");
      if (arrow == std::string_view::npos) throw ParseError("expected '->' in substitution", start);
      std::string_view lhs = item.substr(0, arrow);
      while (!lhs.empty() && lhs.front() == ' ') lhs.remove_prefix(1);
      Word g = parse_word(lhs, rank);
      if (g.length() != 1 || g.syllables()[0].exp != 1) throw ParseError("substitution source must be a single generator", start);
      images[g.syllables()[0].gen - 1] = parse_word(item.substr(arrow + 2), rank);
      if (end == std::string_view::npos) break;
      start = end + 1;
    }
  }
  return Substitution::recognize(rank, images, ctx);
}

}  // namespace nilword
