#include "irreg/rader.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "irreg/mixed_radix.hpp"

namespace irreg::rader {

using arith::Barrett;

namespace {

// Largest |2 f_c(x)| for c in {2, 3}.
constexpr i64 kScaledBound = 2;

i64 lift(u64 r, u64 p) { return r > p / 2 ? static_cast<i64>(r) - static_cast<i64>(p) : static_cast<i64>(r); }

std::vector<u64> powers(u64 base, std::size_t count, const Barrett& mod) {
  std::vector<u64> out(count);
  u64 x = mod.reduce(1);
  for (auto& v : out) {
    v = x;
    x = mod.mul(x, base);
  }
  return out;
}

}  // namespace

RaderPlan build_rader_plan(u64 n, u64 max_exponent) {
  if (n < 5 || !arith::is_prime(n)) {
    throw std::invalid_argument("build_rader_plan: n must be a prime >= 5");
  }
  for (u64 y : {u64{2}, u64{3}}) {
    arith::PowerGenerator gen;
    try {
      gen = arith::solve_power_generator(n, y, max_exponent);
    } catch (const arith::OrderTooSmall&) {
      continue;
    }
    RaderPlan plan;
    plan.n = n;
    plan.z = gen.z;
    plan.M = gen.M;
    plan.y = y;
    plan.perm_out.resize(n - 1);
    plan.perm_in.resize(n - 1);
    const u64 zi = arith::inv_mod(gen.z, n);
    u64 fwd = 1, back = 1;
    for (std::size_t s = 0; s + 1 < n; ++s) {
      plan.perm_out[s] = static_cast<u32>(fwd);
      plan.perm_in[s] = static_cast<u32>(back);
      fwd = fwd * gen.z % n;
      back = back * zi % n;
    }
    return plan;
  }
  throw Rejected("build_rader_plan: 2 and 3 both have small order modulo " + std::to_string(n));
}

std::vector<u64> gen_geometric(u64 start, const RaderPlan& plan, std::size_t length,
                               const Barrett& p) {
  std::vector<u64> out(length);
  const std::size_t direct = std::min<std::size_t>(length, plan.M);
  u64 e = 1;
  for (std::size_t s = 0; s < direct; ++s) {
    out[s] = p.pow(start, e);
    e = e * plan.z % plan.n;
  }
  for (std::size_t s = direct; s < length; ++s) {
    const u64 prev = out[s - plan.M];
    const u64 sq = p.mul(prev, prev);
    out[s] = plan.y == 2 ? sq : p.mul(sq, prev);
  }
  return out;
}

RaderDft::RaderDft(const RaderPlan& plan, u64 root, const Barrett& p, i64 input_bound)
    : plan_(plan), p_(p) {
  const std::size_t len = plan.n - 1;
  const u64 pm = p.modulus();
  auto seq = gen_geometric(root, plan, len, p);
  v_.resize(len);
  for (std::size_t s = 0; s < len; ++s) v_[s] = lift(seq[s], pm);

  const std::size_t padded = ntt::next_pow2(2 * len);
  const i128 bound = static_cast<i128>(len) * input_bound * static_cast<i128>(pm / 2);
  conv_.emplace(ntt::plans_for_bound(bound), ntt::ConvShape{{{padded, ntt::DimKind::zero_padded}}},
                v_);
  u_.resize(len);
  w_.resize(padded);
}

std::vector<i64> RaderDft::lifted_u(std::span<const i64> x) const {
  std::vector<i64> u(plan_.n - 1);
  for (std::size_t s = 0; s < u.size(); ++s) u[s] = x[plan_.perm_in[s]];
  return u;
}

void RaderDft::apply(std::span<const i64> x, std::span<u64> out) {
  const std::size_t n = plan_.n;
  if (x.size() != n || out.size() != n) {
    throw std::invalid_argument("RaderDft: row length mismatch");
  }
  const u64 pm = p_.modulus();
  i64 total = 0;
  for (std::size_t s = 0; s + 1 < n; ++s) {
    u_[s] = x[plan_.perm_in[s]];
    total += u_[s];
  }
  const u64 x0 = p_.from_signed(x[0]);
  out[0] = p_.add(x0, p_.from_signed(total));
  conv_->multiply_mod(u_, p_, w_);
  for (std::size_t t = 0; t + 1 < n; ++t) {
    u64 acc = x0 + w_[t] + w_[t + n - 1];
    acc = acc >= pm ? acc - pm : acc;
    out[plan_.perm_out[t]] = acc >= pm ? acc - pm : acc;
  }
}

DeSplit build_de_split(u64 n1, u64 n2, u64 max_cyclic) {
  if (n1 >= n2 || !arith::is_prime(n1) || !arith::is_prime(n2)) {
    throw std::invalid_argument("build_de_split: need distinct primes n1 < n2");
  }
  const auto f1 = arith::factorize(n1 - 1);
  const auto f2 = arith::factorize(n2 - 1);
  auto exponent = [](const arith::Factorization& f, u64 prime) -> unsigned {
    for (auto [q, e] : f.factors)
      if (q == prime) return e;
    return 0;
  };
  auto ipow = [](u64 b, unsigned e) {
    u64 r = 1;
    while (e--) r *= b;
    return r;
  };
  std::vector<u64> primes = f1.primes();
  for (u64 q : f2.primes()) primes.push_back(q);
  std::sort(primes.begin(), primes.end());
  primes.erase(std::unique(primes.begin(), primes.end()), primes.end());

  DeSplit s;
  s.n1 = n1;
  s.n2 = n2;
  for (u64 q : primes) {
    const unsigned a1 = exponent(f1, q), a2 = exponent(f2, q);
    if (a1 >= a2) {
      s.d1 *= ipow(q, a1);
      s.e2 *= ipow(q, a2);
    } else {
      s.e1 *= ipow(q, a1);
      s.d2 *= ipow(q, a2);
    }
  }
  const u64 cyclic = s.e1 * s.e2;
  if (cyclic > max_cyclic) {
    throw Rejected("build_de_split: cyclic part " + std::to_string(cyclic) + " too large");
  }
  if (cyclic > 1 && smooth_radices(cyclic).empty()) {
    throw Rejected("build_de_split: cyclic part " + std::to_string(cyclic) + " not 7-smooth");
  }

  const u64 n = n1 * n2;
  const u64 g1 = arith::primitive_root(n1, f1);
  const u64 g2 = arith::primitive_root(n2, f2);
  // Unit mod n with prescribed residues mod n1 and mod n2.
  auto crt = [&](u64 r1, u64 r2) {
    const u64 k = (r2 + n2 - r1 % n2) % n2 * arith::inv_mod(n1 % n2, n2) % n2;
    return (k * n1 + r1) % n;
  };
  s.u0 = crt(arith::pow_mod(g1, s.e1, n1), arith::pow_mod(g2, s.e2, n2));
  s.u1 = crt(arith::pow_mod(g1, s.d1, n1), 1);
  s.u2 = crt(1, arith::pow_mod(g2, s.d2, n2));

  const std::size_t padded = ntt::next_pow2(2 * s.d1 * s.d2);
  try {
    s.conv_plan = ntt::find_ntt_prime(padded, cyclic, 62);
  } catch (const ntt::NoPrimeFound& e) {
    throw Rejected(std::string("build_de_split: ") + e.what());
  }
  return s;
}

Rader2Row::Rader2Row(const DeSplit& split, const RaderPlan& plan1, const RaderPlan& plan2,
                     u64 omega, const Barrett& p)
    : split_(split),
      p_(p),
      n_(split.n1 * split.n2),
      dd_(split.d1 * split.d2),
      ee_(split.e1 * split.e2),
      padded_(ntt::next_pow2(2 * dd_)),
      dft1_(plan1, p.pow(omega, split.n2), p,
            kScaledBound * static_cast<i64>(split.n2)),
      dft2_(plan2, p.pow(omega, split.n1), p,
            kScaledBound * static_cast<i64>(split.n1)) {
  if (plan1.n != split.n1 || plan2.n != split.n2) {
    throw std::invalid_argument("Rader2Row: plans do not match the split");
  }
  const u64 pm = p.modulus();
  const i128 bound = static_cast<i128>(dd_ * ee_) * kScaledBound * static_cast<i128>(pm / 2);
  if (2 * bound >= static_cast<i128>(split.conv_plan.q)) {
    throw Rejected("Rader2Row: convolution prime too small for this p");
  }

  const u64 n = n_;
  const Barrett bn(n);
  const auto inv0 = powers(arith::inv_mod(split.u0, n), dd_, bn);
  const auto inv1 = powers(arith::inv_mod(split.u1, n), split.e1, bn);
  const auto inv2 = powers(arith::inv_mod(split.u2, n), split.e2, bn);
  const auto fw0 = powers(split.u0, dd_, bn);
  const auto fw1 = powers(split.u1, split.e1, bn);
  const auto fw2 = powers(split.u2, split.e2, bn);
  const std::size_t units = dd_ * ee_;
  unit_index_.resize(units);
  out_index_.resize(units);
  out_mod1_.resize(units);
  out_mod2_.resize(units);
  // Slot (s1, s2, s0) of the convolution array; s0 varies fastest.
  slot_.resize(units);
  for (std::size_t s1 = 0; s1 < split.e1; ++s1)
    for (std::size_t s2 = 0; s2 < split.e2; ++s2) {
      const u64 a = bn.mul(inv1[s1], inv2[s2]), b = bn.mul(fw1[s1], fw2[s2]);
      for (std::size_t s0 = 0; s0 < dd_; ++s0) {
        const std::size_t idx = (s1 * split.e2 + s2) * dd_ + s0;
        unit_index_[idx] = static_cast<u32>(bn.mul(a, inv0[s0]));
        const u64 l = bn.mul(b, fw0[s0]);
        out_index_[idx] = static_cast<u32>(l);
        out_mod1_[idx] = static_cast<u32>(l % split.n1);
        out_mod2_[idx] = static_cast<u32>(l % split.n2);
        slot_[idx] = static_cast<u32>((s1 * split.e2 + s2) * padded_ + s0);
      }
    }

  const auto omega_pow = powers(omega, n, p);
  std::vector<i64> fixed(padded_ * ee_, 0);
  for (std::size_t i = 0; i < units; ++i) fixed[slot_[i]] = lift(omega_pow[out_index_[i]], pm);
  ntt::ConvShape shape{{{split.e1, ntt::DimKind::cyclic},
                        {split.e2, ntt::DimKind::cyclic},
                        {padded_, ntt::DimKind::zero_padded}}};
  conv_.emplace(std::vector<ntt::NttPlan>{split.conv_plan}, std::move(shape), fixed);

  sums1_.resize(split.n1);
  sums2_.resize(split.n2);
  x1_.resize(split.n1);
  x2_.resize(split.n2);
  big_.assign(padded_ * ee_, 0);
  r1_.resize(split.n1);
  r2_.resize(split.n2);
  t1_.resize(split.n1);
  t2_.resize(split.n2);
  conv_out_.resize(padded_ * ee_);
}

void Rader2Row::apply(std::span<const i64> row, std::span<u64> out) {
  const std::size_t n1 = split_.n1, n2 = split_.n2, n = n_;
  if (row.size() != n || out.size() != n) throw std::invalid_argument("Rader2Row: length mismatch");

  std::fill(sums1_.begin(), sums1_.end(), 0);
  std::fill(sums2_.begin(), sums2_.end(), 0);
  i64 total = 0;
  for (std::size_t k = 0, k1 = 0, k2 = 0; k < n; ++k) {
    sums1_[k1] += row[k];
    sums2_[k2] += row[k];
    total += row[k];
    if (++k1 == n1) k1 = 0;
    if (++k2 == n2) k2 = 0;
  }
  for (std::size_t k = 0; k < n1; ++k) x1_[k] = k == 0 ? 0 : row[n2 * k];
  for (std::size_t k = 0; k < n2; ++k) x2_[k] = k == 0 ? 0 : row[n1 * k];

  dft1_.apply(sums1_, r1_);
  dft2_.apply(sums2_, r2_);
  dft1_.apply(x1_, t1_);
  dft2_.apply(x2_, t2_);

  out[0] = p_.from_signed(total);
  for (std::size_t l = 1; l < n1; ++l) out[n2 * l] = r1_[l];
  for (std::size_t l = 1; l < n2; ++l) out[n1 * l] = r2_[l];

  for (std::size_t i = 0; i < unit_index_.size(); ++i) big_[slot_[i]] = row[unit_index_[i]];
  conv_->multiply_mod(big_, p_, conv_out_);

  const u64 a0 = p_.from_signed(row[0]);
  for (std::size_t t = 0; t < unit_index_.size(); ++t) {
    const std::size_t at = slot_[t];
    const u64 acc = a0 + t1_[out_mod1_[t]] + t2_[out_mod2_[t]] + conv_out_[at] + conv_out_[at + dd_];
    out[out_index_[t]] = p_.reduce(acc);
  }
}

}  // namespace irreg::rader
