#include "irreg/pipeline.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "irreg/mixed_radix.hpp"
#include "irreg/umbrella.hpp"

namespace irreg::pipeline {

using arith::Barrett;

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Rader1:
      return "rader1";
    case Strategy::Rader2:
      return "rader2";
    case Strategy::Umbrella:
      return "umbrella";
  }
  return "unknown";
}

std::optional<Strategy> parse_strategy(const std::string& name) {
  if (name == "rader1") return Strategy::Rader1;
  if (name == "rader2") return Strategy::Rader2;
  if (name == "umbrella") return Strategy::Umbrella;
  return std::nullopt;
}

i64 f_value(u64 c, u64 p, u64 x) {
  const u64 y = arith::mul_mod(x, arith::inv_mod(c, p), p);
  return 2 * static_cast<i64>(c * y / p) - static_cast<i64>(c - 1);
}

namespace {

void make_umbrella(PrimeContext& ctx) {
  ctx.strategy = Strategy::Umbrella;
  ctx.c = ctx.gamma;
  ctx.alpha_c = ctx.p - 1;
  ctx.plan1.reset();
  ctx.plan2.reset();
  ctx.split.reset();
}

// Fills in a Rader strategy when one applies; leaves ctx untouched otherwise.
void try_rader(PrimeContext& ctx, const arith::Factorization& phi) {
  const u64 p = ctx.p;
  const auto& nf = ctx.n_factors;
  if (ctx.n == 1 || nf.factors.size() > 2 || !nf.is_squarefree()) return;

  u64 c = 0, alpha = 0;
  for (u64 candidate : {u64{2}, u64{3}}) {
    const u64 order = arith::element_order(candidate, p, phi);
    if (order * 100 > p - 1) {
      c = candidate;
      alpha = order;
      break;
    }
  }
  if (c == 0) return;

  try {
    if (nf.factors.size() == 1) {
      ctx.plan1 = rader::build_rader_plan(ctx.n);
      ctx.strategy = Strategy::Rader1;
    } else {
      const u64 n1 = nf.factors[0].prime, n2 = nf.factors[1].prime;
      auto split = rader::build_de_split(n1, n2);
      const i128 bound = static_cast<i128>((n1 - 1) * (n2 - 1)) * 2 * static_cast<i128>(p / 2);
      if (2 * bound >= static_cast<i128>(split.conv_plan.q)) return;
      ctx.plan1 = rader::build_rader_plan(n1);
      ctx.plan2 = rader::build_rader_plan(n2);
      ctx.split = std::move(split);
      ctx.strategy = Strategy::Rader2;
    }
  } catch (const rader::Rejected&) {
    make_umbrella(ctx);
    return;
  }
  ctx.c = c;
  ctx.alpha_c = alpha;
}

}  // namespace

PrimeContext classify_prime(u64 p, std::optional<Strategy> force) {
  if (p < 5 || !arith::is_prime(p) || p >= (u64{1} << 31)) {
    throw std::invalid_argument("classify_prime: p must be a prime in [5, 2^31)");
  }
  PrimeContext ctx;
  ctx.p = p;
  const auto phi = arith::factorize(p - 1);
  ctx.gamma = arith::primitive_root(p, phi);
  const auto split = arith::smooth_split((p - 1) / 2);
  ctx.m = split.m;
  ctx.n = split.n;
  ctx.n_factors = arith::factorize(ctx.n);
  const u64 order = p - 1;
  ctx.omega = arith::pow_mod(ctx.gamma, 4 * ctx.m * ctx.m % order, p);
  ctx.theta = arith::pow_mod(ctx.gamma, ctx.n * ctx.n % order, p);
  ctx.xi = arith::pow_mod(ctx.gamma, 2 * ctx.m * ctx.m % order, p);
  make_umbrella(ctx);

  if (force == Strategy::Umbrella) return ctx;
  try_rader(ctx, phi);
  if (force && *force != ctx.strategy) make_umbrella(ctx);
  return ctx;
}

Layout build_layout(const PrimeContext& ctx) {
  const u64 p = ctx.p, c = ctx.c;
  const Barrett bp(p);
  Layout layout;
  layout.rows = ctx.m;
  layout.cols = ctx.n;
  layout.a2.resize(ctx.m * ctx.n);
  const u64 step = bp.pow(ctx.gamma, 2 * ctx.m);
  const u64 row_step = bp.pow(ctx.gamma, ctx.n);
  const i64 shift = static_cast<i64>(c - 1);
  // y runs over x / c for x = gamma^{n i2 + 2m i1}.
  u64 row_start = arith::inv_mod(c, p);
  for (std::size_t i2 = 0; i2 < ctx.m; ++i2) {
    i32* out = layout.a2.data() + i2 * ctx.n;
    u64 y = row_start;
    for (std::size_t i1 = 0; i1 < ctx.n; ++i1) {
      u64 rem;
      const u64 fl = bp.divmod(c * y, rem);
      out[i1] = static_cast<i32>(2 * static_cast<i64>(fl) - shift);
      y = bp.mul(y, step);
    }
    row_start = bp.mul(row_start, row_step);
  }
  return layout;
}

void horizontal_dfts(const PrimeContext& ctx, Layout& layout) {
  const Barrett bp(ctx.p);
  const std::size_t n = ctx.n;
  layout.d.assign(ctx.m * n, 0);
  std::vector<i64> row(n);
  std::vector<u64> out(n);

  auto run = [&](auto& engine) {
    for (std::size_t i2 = 0; i2 < ctx.m; ++i2) {
      const i32* src = layout.a2.data() + i2 * n;
      std::copy(src, src + n, row.begin());
      engine.apply(row, out);
      std::copy(out.begin(), out.end(), layout.d.begin() + static_cast<std::ptrdiff_t>(i2 * n));
    }
  };

  switch (ctx.strategy) {
    case Strategy::Rader1: {
      rader::RaderDft engine(*ctx.plan1, ctx.omega, bp, 2);
      run(engine);
      break;
    }
    case Strategy::Rader2: {
      rader::Rader2Row engine(*ctx.split, *ctx.plan1, *ctx.plan2, ctx.omega, bp);
      run(engine);
      break;
    }
    case Strategy::Umbrella: {
      umbrella::BluesteinRow engine(n, ctx.xi, bp);
      run(engine);
      break;
    }
  }
}

std::vector<u32> vertical_dfts(const PrimeContext& ctx, const Layout& layout) {
  const u64 p = ctx.p, m = ctx.m, n = ctx.n;
  const Barrett bp(p);
  std::vector<u64> cur(m * n), next(m * n);
  u64 twist = 1;
  for (u64 i2 = 0; i2 < m; ++i2) {
    for (u64 j1 = 0; j1 < n; ++j1) cur[i2 * n + j1] = bp.mul(layout.d[i2 * n + j1], twist);
    twist = bp.mul(twist, ctx.theta);
  }

  // Self-sorting mixed-radix DFT of length m with root theta^2, applied to
  // whole rows at once.
  std::vector<u64> pw(m);
  const u64 root = bp.mul(ctx.theta, ctx.theta);
  u64 x = 1;
  for (auto& w : pw) {
    w = x;
    x = bp.mul(x, root);
  }
  std::size_t done = 1;
  for (unsigned r : smooth_radices(m)) {
    const std::size_t groups = m / r;
    const std::size_t span = m / (done * r);
    std::array<u64, 7 * 7> coef{};
    for (std::size_t j = 0; j < groups; ++j) {
      const std::size_t k = j % done;
      const std::size_t dst = (j / done) * done * r + k;
      for (unsigned t = 0; t < r; ++t)
        for (unsigned t2 = 0; t2 < r; ++t2)
          coef[t * r + t2] = pw[(span * t * k + groups * ((t * t2) % r)) % m];
      for (unsigned t2 = 0; t2 < r; ++t2) {
        u64* out = next.data() + (dst + t2 * done) * n;
        const u64* in0 = cur.data() + j * n;
        std::copy(in0, in0 + n, out);
        for (unsigned t = 1; t < r; ++t) {
          const u64* in = cur.data() + (j + t * groups) * n;
          const u64 c = coef[t * r + t2];
          for (u64 col = 0; col < n; ++col) out[col] = bp.add(out[col], bp.mul(in[col], c));
        }
      }
    }
    cur.swap(next);
    done *= r;
  }

  std::vector<u32> b(p - 1, 0);
  for (u64 jp = 0; jp < m; ++jp) {
    u64 j = n * (2 * jp + 1) % (p - 1);
    const u64* row = cur.data() + jp * n;
    for (u64 j1 = 0; j1 < n; ++j1) {
      b[j] = static_cast<u32>(row[j1]);
      j += 2 * m;
      if (j >= p - 1) j -= p - 1;
    }
  }
  return b;
}

std::vector<std::pair<u32, u32>> recover_missing(const PrimeContext& ctx) {
  const u64 p = ctx.p, alpha = ctx.alpha_c, g = ctx.gamma;
  std::vector<std::pair<u32, u32>> out;
  if (alpha == p - 1) return out;
  const u64 count = (p - 1) / alpha;
  const Barrett bp(p);
  const u64 g_inv = arith::inv_mod(g, p);

  // S_k = sum over i == k (mod count) of gamma^{-i} 2 f_gamma(gamma^i),
  // accumulated over independent segments of the exponent range.
  constexpr std::size_t kLanes = 4;
  const u64 total = p - 1;
  const u64 seg = (total + kLanes - 1) / kLanes;
  std::array<std::vector<u64>, kLanes> sums;
  std::array<u64, kLanes> y{}, w{}, k{}, end{}, i{};
  for (std::size_t l = 0; l < kLanes; ++l) {
    sums[l].assign(count, 0);
    i[l] = std::min(total, l * seg);
    end[l] = std::min(total, (l + 1) * seg);
    y[l] = bp.mul(bp.pow(g, i[l]), g_inv);  // gamma^{i-1}
    w[l] = bp.pow(g_inv, i[l]);             // gamma^{-i}
    k[l] = i[l] % count;
  }
  const u64 shift = g - 1;
  const u64 steps = seg;
  for (u64 step = 0; step < steps; ++step) {
    for (std::size_t l = 0; l < kLanes; ++l) {
      if (i[l] >= end[l]) continue;
      u64 x;
      const u64 fl = bp.divmod(g * y[l], x);
      const u64 scaled = bp.reduce(2 * fl + p - shift);
      sums[l][k[l]] = bp.add(sums[l][k[l]], bp.mul(w[l], scaled));
      y[l] = x;
      w[l] = bp.mul(w[l], g_inv);
      if (++k[l] == count) k[l] = 0;
      ++i[l];
    }
  }
  for (std::size_t l = 1; l < kLanes; ++l)
    for (u64 kk = 0; kk < count; ++kk) sums[0][kk] = bp.add(sums[0][kk], sums[l][kk]);

  const u64 half = arith::inv_mod(2, p);
  const u64 root = bp.pow(g, alpha);
  for (u64 j = 1; j < count; ++j) {
    const u64 r = j * alpha;
    if (r % 2 != 0 || r > p - 3) continue;
    const u64 wj = bp.pow(root, j);
    u64 value = 0, wk = 1;
    for (u64 kk = 0; kk < count; ++kk) {
      value = bp.add(value, bp.mul(wk, sums[0][kk]));
      wk = bp.mul(wk, wj);
    }
    value = bp.mul(value, half);
    const u64 denom = bp.sub(bp.pow(g, r), 1);
    const u64 bern = bp.mul(bp.mul(r % p, value), arith::inv_mod(denom, p));
    out.emplace_back(static_cast<u32>(r), static_cast<u32>(bern));
  }
  return out;
}

std::vector<TenPair> smallest_pairs(const std::vector<u32>& bern, u64 p) {
  std::vector<u64> packed;
  packed.reserve(p / 2);
  for (u64 r = 2; r + 3 <= p; r += 2) packed.push_back(static_cast<u64>(bern[r]) << 32 | r);
  const std::size_t keep = std::min<std::size_t>(10, packed.size());
  std::partial_sort(packed.begin(), packed.begin() + static_cast<std::ptrdiff_t>(keep), packed.end());
  std::vector<TenPair> out;
  for (std::size_t i = 0; i < keep; ++i) {
    out.push_back({static_cast<u32>(packed[i] & 0xffffffffu), static_cast<u32>(packed[i] >> 32)});
  }
  return out;
}

u64 checksum(const ResidueTable& table) {
  const u64 p = table.p;
  const Barrett bp(p);
  constexpr std::size_t kLanes = 8;
  // Lane l handles r = 2 + 2(l + kLanes j), weighted by 4^{r/2} (r + 1).
  std::array<u64, kLanes> weight{}, acc{};
  const u64 step = bp.pow(4, kLanes);
  for (std::size_t l = 0; l < kLanes; ++l) weight[l] = bp.pow(4, l + 1);
  const u64 count = (p - 3) / 2;
  for (u64 base = 0; base < count; base += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) {
      const u64 idx = base + l;
      if (idx < count) {
        const u64 r = 2 * idx + 2;
        acc[l] = bp.add(acc[l], bp.mul(bp.mul(weight[l], r + 1), table.bern[r]));
      }
      weight[l] = bp.mul(weight[l], step);
    }
  }
  // B_0 contributes 1 and B_1 = -1/2 contributes -2.
  u64 sum = p - 1;
  for (u64 a : acc) sum = bp.add(sum, a);
  return sum;
}

bool checksum_verify(const ResidueTable& table) { return (checksum(table) + 4) % table.p == 0; }

ResidueTable assemble(const PrimeContext& ctx, std::vector<u32> b,
                      const std::vector<std::pair<u32, u32>>& missing) {
  const u64 p = ctx.p;
  const Barrett bp(p);
  ResidueTable table;
  table.p = p;
  table.b = std::move(b);
  table.bern.assign(p - 1, 0);

  // Batch inversion of c^r - 1, split into independent lanes; indices with
  // c^r = 1 carry a unit denominator and are filled from `missing`.
  constexpr std::size_t kLanes = 8;
  const u64 count = (p - 3) / 2;
  const u64 padded = (count + kLanes - 1) / kLanes * kLanes;
  std::vector<u32> denom(padded, 1), prefix(padded);
  std::array<u64, kLanes> cr{}, acc{};
  const u64 c2 = bp.mul(ctx.c, ctx.c);
  const u64 step = bp.pow(c2, kLanes);
  for (std::size_t l = 0; l < kLanes; ++l) {
    cr[l] = bp.pow(c2, l + 1);
    acc[l] = 1;
  }
  std::size_t determined = 0;
  for (u64 base = 0; base < padded; base += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) {
      const u64 idx = base + l;
      if (idx < count && cr[l] != 1) {
        denom[idx] = static_cast<u32>(cr[l] - 1);
        ++determined;
      }
      prefix[idx] = static_cast<u32>(acc[l]);
      acc[l] = bp.mul(acc[l], denom[idx]);
      cr[l] = bp.mul(cr[l], step);
    }
  }
  std::array<u64, kLanes> inv{};
  for (std::size_t l = 0; l < kLanes; ++l) inv[l] = arith::inv_mod(acc[l], p);
  for (u64 base = padded; base > 0;) {
    base -= kLanes;
    for (std::size_t l = 0; l < kLanes; ++l) {
      const u64 idx = base + l;
      const u64 di = bp.mul(inv[l], prefix[idx]);
      inv[l] = bp.mul(inv[l], denom[idx]);
      if (idx < count) {
        const u64 r = 2 * idx + 2;
        table.bern[r] = static_cast<u32>(bp.mul(bp.mul(r, table.b[r - 1]), di));
      }
    }
  }
  std::size_t filled = determined;
  for (auto [r, value] : missing) {
    table.bern[r] = value;
    ++filled;
  }
  if (filled != (p - 3) / 2) throw std::logic_error("assemble: Bernoulli table is incomplete");

  for (u64 r = 2; r + 3 <= p; r += 2)
    if (table.bern[r] == 0) table.irregular.push_back(static_cast<u32>(r));
  table.checksum = checksum(table);
  table.ten_pairs = smallest_pairs(table.bern, p);
  return table;
}

namespace {

ResidueTable run(const PrimeContext& ctx) {
  Layout layout = build_layout(ctx);
  horizontal_dfts(ctx, layout);
  auto b = vertical_dfts(ctx, layout);
  layout = Layout{};
  return assemble(ctx, std::move(b), recover_missing(ctx));
}

}  // namespace

Computation compute_table(u64 p, std::optional<Strategy> force) {
  Computation out{classify_prime(p, force), {}};
  try {
    out.table = run(out.ctx);
  } catch (const rader::Rejected&) {
    out.ctx = classify_prime(p, Strategy::Umbrella);
    out.table = run(out.ctx);
  }
  return out;
}

IrregularRecord compute_irregular(u64 p, std::optional<Strategy> force) {
  auto [ctx, table] = compute_table(p, force);
  IrregularRecord rec;
  rec.p = p;
  rec.strategy = ctx.strategy;
  rec.irregular = std::move(table.irregular);
  rec.ten_pairs = std::move(table.ten_pairs);
  rec.checksum_ok = (table.checksum + 4) % p == 0;
  return rec;
}

}  // namespace irreg::pipeline
