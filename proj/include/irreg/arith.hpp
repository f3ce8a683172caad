#pragma once

// Word-sized modular arithmetic and multiplicative-group utilities.

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace irreg {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i32 = std::int32_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

}  // namespace irreg

namespace irreg::arith {

struct NotInvertible : std::domain_error {
  using std::domain_error::domain_error;
};

struct ZeroElement : std::domain_error {
  using std::domain_error::domain_error;
};

/// Raised when (n-1)/ord(y) exceeds the allowed exponent bound.
struct OrderTooSmall : std::domain_error {
  using std::domain_error::domain_error;
};

struct PrimePower {
  u64 prime;
  unsigned exponent;

  bool operator==(const PrimePower&) const = default;
};

struct Factorization {
  u64 value = 1;
  std::vector<PrimePower> factors;  // ascending by prime

  std::vector<u64> primes() const;
  bool is_squarefree() const;
};

inline u64 mul_mod(u64 a, u64 b, u64 modulus) {
  return static_cast<u64>(static_cast<u128>(a) * b % modulus);
}

u64 pow_mod(u64 base, u64 exp, u64 modulus);
u64 inv_mod(u64 x, u64 modulus);

/// Deterministic for every k < 2^64.
bool is_prime(u64 k);

/// Complete factorization of 1 <= k < 2^32.
Factorization factorize(u64 k);

/// All primes in [from, to], by a segmented sieve.
std::vector<u32> primes_in_range(u64 from, u64 to);

struct SmoothSplit {
  u64 m;  // 7-smooth part
  u64 n;  // cofactor, coprime to 210
};

SmoothSplit smooth_split(u64 k);

u64 element_order(u64 x, u64 modulus, const Factorization& phi_factors);

/// Smallest generator of (Z/pZ)^*.
u64 primitive_root(u64 p);
u64 primitive_root(u64 p, const Factorization& phi_factors);

struct PowerGenerator {
  u64 z;  // generator of (Z/nZ)^*
  u64 M;  // z^M == y (mod n)
};

/// Finds the smallest generator z of (Z/nZ)^* with z^M == y, where
/// M = (n-1)/ord(y). Throws OrderTooSmall when M > max_exponent.
PowerGenerator solve_power_generator(u64 n, u64 y, u64 max_exponent = 100);

/// Barrett reduction for moduli below 2^32; inputs up to 2^64 - 1.
class Barrett {
 public:
  Barrett() = default;
  explicit Barrett(u64 modulus)
      : m_(modulus), mu_(static_cast<u64>((static_cast<u128>(1) << 64) / modulus)) {}

  u64 modulus() const { return m_; }

  u64 reduce(u64 x) const {
    u64 q = static_cast<u64>((static_cast<u128>(x) * mu_) >> 64);
    u64 r = x - q * m_;
    while (r >= m_) r -= m_;
    return r;
  }

  /// Quotient and remainder of x by the modulus.
  u64 divmod(u64 x, u64& rem) const {
    u64 q = static_cast<u64>((static_cast<u128>(x) * mu_) >> 64);
    u64 r = x - q * m_;
    while (r >= m_) {
      r -= m_;
      ++q;
    }
    rem = r;
    return q;
  }

  u64 mul(u64 a, u64 b) const { return reduce(a * b); }
  u64 add(u64 a, u64 b) const {
    u64 s = a + b;
    return s >= m_ ? s - m_ : s;
  }
  u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + m_ - b; }
  u64 pow(u64 base, u64 exp) const;

  /// Maps a signed integer to its canonical residue.
  u64 from_signed(i64 x) const {
    i64 r = x % static_cast<i64>(m_);
    return static_cast<u64>(r < 0 ? r + static_cast<i64>(m_) : r);
  }

 private:
  u64 m_ = 1;
  u64 mu_ = 0;
};

/// Montgomery arithmetic for odd moduli below 2^62. Values handed to mul()
/// may be lazily reduced in [0, 4q); results land in [0, 2q).
class Montgomery {
 public:
  Montgomery() = default;
  explicit Montgomery(u64 q);

  u64 modulus() const { return q_; }

  u64 reduce(u128 t) const {
    u64 m = static_cast<u64>(t) * neg_inv_;
    return static_cast<u64>((t + static_cast<u128>(m) * q_) >> 64);
  }
  u64 mul(u64 a, u64 b) const { return reduce(static_cast<u128>(a) * b); }
  u64 to_mont(u64 x) const { return normalize(mul(x % q_, r2_)); }
  u64 from_mont(u64 x) const { return normalize(reduce(x)); }
  u64 normalize(u64 x) const { return x >= q_ ? x - q_ : x; }

  /// Ordinary modular product of canonical residues.
  u64 mul_plain(u64 a, u64 b) const { return normalize(mul(mul(a, b), r2_)); }
  u64 pow_plain(u64 base, u64 exp) const;

 private:
  u64 q_ = 0;
  u64 neg_inv_ = 0;  // -q^{-1} mod 2^64
  u64 r2_ = 0;       // 2^128 mod q
};

}  // namespace irreg::arith
