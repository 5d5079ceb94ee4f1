#pragma once

// Small integer helpers shared by the word, group and canonical-form code.

#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <tuple>
#include <stdexcept>
#include <utility>
#include <vector>

namespace nilword {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

inline i64 checked_add(i64 a, i64 b) {
  i64 r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("exponent overflow");
  return r;
}

inline i64 checked_mul(i64 a, i64 b) {
  i64 r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("exponent overflow");
  return r;
}

inline u64 checked_mul(u64 a, u64 b) {
  u64 r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("count overflow");
  return r;
}

/// Least nonnegative residue.
inline i64 mod(i128 a, i64 m) {
  i128 r = a % m;
  return static_cast<i64>(r < 0 ? r + m : r);
}

inline u64 ipow(u64 base, unsigned e) {
  u64 r = 1;
  while (e-- > 0) r = checked_mul(r, base);
  return r;
}

inline bool is_prime(i64 n) {
  if (n < 2) return false;
  for (i64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

/// Distinct prime divisors in increasing order.
inline std::vector<u64> prime_divisors(u64 n) {
  std::vector<u64> ps;
  for (u64 d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      ps.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) ps.push_back(n);
  return ps;
}

/// If n = p^e with p prime and e >= 1, returns (p, e).
inline std::optional<std::pair<u64, unsigned>> prime_power(u64 n) {
  auto ps = prime_divisors(n);
  if (ps.size() != 1) return std::nullopt;
  unsigned e = 0;
  while (n > 1) {
    n /= ps[0];
    ++e;
  }
  return std::pair{ps[0], e};
}

/// p-adic valuation of x modulo p^E, with x = 0 (mod p^E) mapped to E.
inline int valuation(i64 x, i64 p, int E) {
  int v = 0;
  while (v < E && x % p == 0) {
    x /= p;
    ++v;
  }
  return x == 0 ? E : v;
}

/// Splits a nonzero residue x mod p^E into p^v * u with u a unit.
inline std::pair<int, i64> split_valuation(i64 x, i64 p) {
  int v = 0;
  while (x % p == 0) {
    x /= p;
    ++v;
  }
  return {v, x};
}

/// Inverse of a unit modulo m.
inline i64 inverse_mod(i64 a, i64 m) {
  i64 g = m, x = 0, x1 = 1, r = mod(a, m);
  while (r != 0) {
    i64 q = g / r;
    std::tie(g, r) = std::pair{r, g - q * r};
    std::tie(x, x1) = std::pair{x1, x - q * x1};
  }
  if (g != 1) throw std::domain_error("not a unit");
  return mod(x, m);
}

/// Residue in (-m/2, m/2], used to keep certificate exponents short.
inline i64 signed_residue(i64 a, i64 m) {
  i64 r = mod(a, m);
  return r > m / 2 ? r - m : r;
}

/// 64-bit splitmix generator. The output stream for a given seed is fixed
/// on every platform, which is what reproducible sampling relies on.
class SplitMix64 {
 public:
  explicit SplitMix64(u64 seed) : state_(seed) {}

  u64 next() {
    u64 z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, bound) by rejection.
  u64 below(u64 bound) {
    const u64 limit = std::numeric_limits<u64>::max() - std::numeric_limits<u64>::max() % bound;
    u64 x;
    do x = next();
    while (x >= limit);
    return x % bound;
  }

 private:
  u64 state_;
};

}  // namespace nilword
