#include "irreg/arith.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace irreg::arith {

std::vector<u64> Factorization::primes() const {
  std::vector<u64> out;
  out.reserve(factors.size());
  for (const auto& f : factors) out.push_back(f.prime);
  return out;
}

bool Factorization::is_squarefree() const {
  return std::all_of(factors.begin(), factors.end(),
                     [](const PrimePower& f) { return f.exponent == 1; });
}

u64 pow_mod(u64 base, u64 exp, u64 modulus) {
  if (modulus == 1) return 0;
  u64 result = 1;
  base %= modulus;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, modulus);
    base = mul_mod(base, base, modulus);
    exp >>= 1;
  }
  return result;
}

u64 inv_mod(u64 x, u64 modulus) {
  i128 r0 = modulus, r1 = x % modulus;
  i128 t0 = 0, t1 = 1;
  while (r1 != 0) {
    i128 q = r0 / r1;
    i128 r2 = r0 - q * r1;
    r0 = r1;
    r1 = r2;
    i128 t2 = t0 - q * t1;
    t0 = t1;
    t1 = t2;
  }
  if (r0 != 1) {
    throw NotInvertible("inv_mod: " + std::to_string(x) + " is not invertible mod " +
                        std::to_string(modulus));
  }
  if (t0 < 0) t0 += modulus;
  return static_cast<u64>(t0);
}

u64 Barrett::pow(u64 base, u64 exp) const {
  u64 result = 1 % m_;
  base = reduce(base);
  while (exp > 0) {
    if (exp & 1) result = mul(result, base);
    base = mul(base, base);
    exp >>= 1;
  }
  return result;
}

Montgomery::Montgomery(u64 q) : q_(q) {
  if (q % 2 == 0 || q >= (u64{1} << 62)) {
    throw std::invalid_argument("Montgomery: modulus must be odd and below 2^62");
  }
  // Newton iteration for q^{-1} mod 2^64; each step doubles the correct bits.
  u64 inv = q;
  for (int i = 0; i < 6; ++i) inv *= 2 - q * inv;
  neg_inv_ = ~inv + 1;
  u64 r = static_cast<u64>((static_cast<u128>(1) << 64) % q);
  r2_ = static_cast<u64>(static_cast<u128>(r) * r % q);
}

u64 Montgomery::pow_plain(u64 base, u64 exp) const {
  u64 b = to_mont(base);
  u64 acc = to_mont(1);
  while (exp > 0) {
    if (exp & 1) acc = mul(acc, b);
    b = mul(b, b);
    exp >>= 1;
  }
  return from_mont(acc);
}

bool is_prime(u64 k) {
  if (k < 2) return false;
  static constexpr u64 small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (u64 s : small) {
    if (k == s) return true;
    if (k % s == 0) return false;
  }
  u64 d = k - 1;
  int r = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++r;
  }
  // These twelve bases are a proven witness set for all k < 3.3e24.
  for (u64 a : small) {
    u64 x = pow_mod(a, d, k);
    if (x == 1 || x == k - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = mul_mod(x, x, k);
      if (x == k - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

Factorization factorize(u64 k) {
  if (k == 0 || k >= (u64{1} << 32)) {
    throw std::invalid_argument("factorize: argument must lie in [1, 2^32)");
  }
  Factorization f;
  f.value = k;
  auto take = [&](u64 prime) {
    unsigned e = 0;
    while (k % prime == 0) {
      k /= prime;
      ++e;
    }
    if (e > 0) f.factors.push_back({prime, e});
  };
  take(2);
  take(3);
  // Wheel over 6j +- 1 up to 2^16; any cofactor left below 2^32 is then prime.
  for (u64 d = 5; d * d <= k && d < (u64{1} << 16); d += 6) {
    take(d);
    take(d + 2);
  }
  if (k > 1) f.factors.push_back({k, 1});
  return f;
}

SmoothSplit smooth_split(u64 k) {
  u64 m = 1;
  for (u64 s : {2, 3, 5, 7}) {
    while (k % s == 0) {
      k /= s;
      m *= s;
    }
  }
  return {m, k};
}

u64 element_order(u64 x, u64 modulus, const Factorization& phi_factors) {
  if (x % modulus == 0) throw ZeroElement("element_order: zero has no multiplicative order");
  u64 order = phi_factors.value;
  for (const auto& [prime, exponent] : phi_factors.factors) {
    for (unsigned i = 0; i < exponent; ++i) {
      if (pow_mod(x, order / prime, modulus) != 1) break;
      order /= prime;
    }
  }
  return order;
}

u64 primitive_root(u64 p, const Factorization& phi_factors) {
  if (p == 2) return 1;
  for (u64 g = 2; g < p; ++g) {
    bool generator = true;
    for (const auto& f : phi_factors.factors) {
      if (pow_mod(g, (p - 1) / f.prime, p) == 1) {
        generator = false;
        break;
      }
    }
    if (generator) return g;
  }
  throw std::invalid_argument("primitive_root: modulus is not prime");
}

u64 primitive_root(u64 p) { return primitive_root(p, factorize(p - 1)); }

namespace {

bool is_generator(u64 z, u64 n, const Factorization& phi) {
  for (const auto& f : phi.factors) {
    if (pow_mod(z, (n - 1) / f.prime, n) == 1) return false;
  }
  return true;
}

// Returns some x with x^ell == w (mod n), for prime ell | n-1 and w an
// ell-th power. Splits n-1 = ell^s * t and corrects w^(ell^-1 mod t) inside
// the ell-Sylow subgroup, whose discrete logs are found digit by digit.
u64 prime_root(u64 w, u64 ell, u64 n, u64 g) {
  const u64 order = n - 1;
  u64 t = order;
  unsigned s = 0;
  while (t % ell == 0) {
    t /= ell;
    ++s;
  }
  const u64 u = t == 1 ? 0 : inv_mod(ell % t, t);
  const u64 x0 = pow_mod(w, u, n);
  // e = x0^ell / w lies in the Sylow subgroup; we need c with c^ell = 1/e.
  const u64 e = mul_mod(pow_mod(x0, ell, n), inv_mod(w, n), n);
  const u64 target = inv_mod(e, n);
  const u64 eta = pow_mod(g, t, n);  // order ell^s
  std::vector<u64> ell_pow(s + 1, 1);
  for (unsigned i = 1; i <= s; ++i) ell_pow[i] = ell_pow[i - 1] * ell;
  const u64 base = pow_mod(eta, ell_pow[s - 1], n);  // order ell
  const u64 eta_inv = inv_mod(eta, n);
  u64 log = 0;
  for (unsigned i = 0; i < s; ++i) {
    u64 h = mul_mod(target, pow_mod(eta_inv, log, n), n);
    h = pow_mod(h, ell_pow[s - 1 - i], n);
    u64 digit = 0, probe = 1;
    while (probe != h) {
      probe = mul_mod(probe, base, n);
      ++digit;
      if (digit >= ell) throw std::logic_error("prime_root: discrete log digit not found");
    }
    log += digit * ell_pow[i];
  }
  if (log % ell != 0) throw std::logic_error("prime_root: argument is not an ell-th power");
  return mul_mod(x0, pow_mod(eta, log / ell, n), n);
}

}  // namespace

PowerGenerator solve_power_generator(u64 n, u64 y, u64 max_exponent) {
  const Factorization phi = factorize(n - 1);
  const u64 order = n - 1;
  const u64 M = order / element_order(y % n, n, phi);
  if (M > max_exponent) {
    throw OrderTooSmall("solve_power_generator: exponent " + std::to_string(M) +
                        " exceeds bound " + std::to_string(max_exponent));
  }
  const u64 g = primitive_root(n, phi);

  // Peel off one prime of M at a time, keeping the running root inside the
  // subgroup of (remaining)-th powers so the next extraction is possible.
  u64 current = y % n;
  u64 remaining = M;
  for (const auto& [ell, exponent] : factorize(M).factors) {
    for (unsigned i = 0; i < exponent; ++i) {
      u64 root = prime_root(current, ell, n, g);
      const u64 zeta = pow_mod(g, order / ell, n);
      const u64 next_remaining = remaining / ell;
      const u64 test_exp = order / next_remaining;
      u64 k = 0;
      while (pow_mod(root, test_exp, n) != 1) {
        root = mul_mod(root, zeta, n);
        if (++k >= ell) throw std::logic_error("solve_power_generator: no admissible root");
      }
      current = root;
      remaining = next_remaining;
    }
  }

  // The M solutions of z^M = y form the coset current * mu_M.
  const u64 zeta_M = pow_mod(g, order / M, n);
  u64 best = 0;
  u64 candidate = current;
  for (u64 k = 0; k < M; ++k) {
    if (is_generator(candidate, n, phi) && (best == 0 || candidate < best)) best = candidate;
    candidate = mul_mod(candidate, zeta_M, n);
  }
  if (best == 0) throw std::logic_error("solve_power_generator: no generator among roots");
  return {best, M};
}

}  // namespace irreg::arith

namespace irreg::arith {

std::vector<u32> primes_in_range(u64 from, u64 to) {
  std::vector<u32> out;
  if (to < 2 || from > to) return out;
  if (to >= (u64{1} << 32)) throw std::invalid_argument("primes_in_range: bound exceeds 2^32");
  from = std::max<u64>(from, 2);
  u64 root = 1;
  while ((root + 1) * (root + 1) <= to) ++root;
  std::vector<u32> base;
  std::vector<bool> small(root + 1, true);
  for (u64 i = 2; i <= root; ++i) {
    if (!small[i]) continue;
    base.push_back(static_cast<u32>(i));
    for (u64 j = i * i; j <= root; j += i) small[j] = false;
  }
  constexpr u64 kSegment = u64{1} << 18;
  std::vector<char> seg;
  for (u64 lo = from; lo <= to; lo += kSegment) {
    const u64 hi = std::min(to, lo + kSegment - 1);
    seg.assign(hi - lo + 1, 1);
    for (u64 q : base) {
      if (q * q > hi) break;
      u64 start = std::max(q * q, (lo + q - 1) / q * q);
      for (u64 j = start; j <= hi; j += q) seg[j - lo] = 0;
    }
    for (u64 x = lo; x <= hi; ++x)
      if (seg[x - lo]) out.push_back(static_cast<u32>(x));
  }
  return out;
}

}  // namespace irreg::arith
