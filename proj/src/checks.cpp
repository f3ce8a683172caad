#include "irreg/checks.hpp"

#include <algorithm>
#include <string>

namespace irreg::checks {

using arith::Barrett;

u64 bernoulli_single(u64 p, u64 r) {
  if (p < 5 || !arith::is_prime(p) || p >= (u64{1} << 31)) {
    throw std::invalid_argument("bernoulli_single: p must be a prime in [5, 2^31)");
  }
  if (r % 2 != 0 || r < 2 || r > p - 3) {
    throw BadIndex("bernoulli_single: r must be even with 2 <= r <= p-3");
  }
  const Barrett bp(p);
  const u64 g = arith::primitive_root(p);
  // x = gamma^i over half the group; f is odd and x^{r-1} is odd, so the
  // other half contributes the same amount.
  const u64 step = bp.pow(g, r - 1);
  u64 y = arith::inv_mod(g, p);  // gamma^{i-1} = x / gamma
  u64 power = 1;                 // gamma^{i(r-1)}
  u128 weighted = 0, plain = 0;
  for (u64 i = 0; i < (p - 1) / 2; ++i) {
    u64 x;
    const u64 fl = bp.divmod(g * y, x);
    weighted += static_cast<u128>(power) * fl;
    plain += power;
    y = x;
    power = bp.mul(power, step);
  }
  const u64 w = static_cast<u64>(weighted % p), s = static_cast<u64>(plain % p);
  const u64 sum = bp.sub(bp.add(w, w), bp.mul((g - 1) % p, s));
  const u64 denom = bp.sub(bp.pow(g, r), 1);
  return bp.mul(bp.mul(r, sum), arith::inv_mod(denom, p));
}

namespace {

// (sum_{a=1}^{(p-1)/2} a^e mod p^2) / p, after checking divisibility.
u64 half_power_sum_quotient(u64 p, u64 e) {
  const u64 p2 = p * p;
  const arith::Montgomery mont(p2);
  u64 sum = 0;
  for (u64 a = 1; a <= (p - 1) / 2; ++a) {
    sum += mont.pow_plain(a, e);
    if (sum >= p2) sum -= p2;
  }
  if (sum % p != 0) {
    throw SumNotDivisible("iwasawa_check: power sum with exponent " + std::to_string(e) +
                          " is not divisible by p");
  }
  return sum / p;
}

}  // namespace

IwasawaReport iwasawa_check(u64 p, u64 r) {
  if (bernoulli_single(p, r) != 0) {
    throw NotIrregular("iwasawa_check: (" + std::to_string(p) + ", " + std::to_string(r) +
                       ") is not an irregular pair");
  }
  IwasawaReport rep;
  rep.p = p;
  rep.r = r;
  rep.s = half_power_sum_quotient(p, r - 1);
  rep.t = half_power_sum_quotient(p, p + r - 2);
  const Barrett bp(p);
  rep.cond1 = bp.pow(2, r) != 1;
  rep.cond2 = rep.s != 0;
  rep.cond3 = rep.s != rep.t;
  const u64 lhs = bp.mul(bp.sub(2, r % p), rep.s);
  const u64 rhs = bp.mul(bp.sub(1, r % p), rep.t);
  rep.cond4 = lhs != rhs;
  rep.verdict = rep.cond1 && rep.cond2 && rep.cond3 && rep.cond4 ? Verdict::Confirmed
                                                                 : Verdict::Inconclusive;
  return rep;
}

bool audit_record(const pipeline::IrregularRecord& record) {
  const u64 p = record.p;
  const std::size_t expected = std::min<u64>(10, (p - 3) / 2);
  if (record.ten_pairs.size() != expected) return false;
  for (std::size_t i = 0; i < record.ten_pairs.size(); ++i) {
    const auto& pair = record.ten_pairs[i];
    if (pair.r % 2 != 0 || pair.r < 2 || pair.r > p - 3) return false;
    if (i > 0) {
      const auto& prev = record.ten_pairs[i - 1];
      if (prev.residue > pair.residue || (prev.residue == pair.residue && prev.r >= pair.r)) {
        return false;
      }
    }
    if (bernoulli_single(p, pair.r) != pair.residue) return false;
  }
  return true;
}

}  // namespace irreg::checks
