#include <random>

#include "doctest.h"
#include "irreg/pipeline.hpp"
#include "irreg/umbrella.hpp"
#include "oracles.hpp"

using namespace irreg;
using namespace irreg::umbrella;

namespace {

std::vector<u64> as_residues(const std::vector<i64>& x, u64 p) {
  std::vector<u64> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = oracle::to_residue(x[i], p);
  return out;
}

}  // namespace

TEST_CASE("lifted Bluestein polynomials for p = 131, row 3") {
  auto ctx = pipeline::classify_prime(131, pipeline::Strategy::Umbrella);
  REQUIRE(ctx.strategy == pipeline::Strategy::Umbrella);
  auto layout = pipeline::build_layout(ctx);
  std::vector<i64> row(ctx.n);
  for (std::size_t k = 0; k < ctx.n; ++k) row[k] = layout.a(3, k);

  BluesteinRow engine(ctx.n, ctx.xi, arith::Barrett(131));
  const std::vector<i64> u_expected = {65, -40, 16, -43, -26, -9, 34, -34, 9, -26, -43, 16, 40};
  const std::vector<i64> v_expected = {1, -18, 45, -32, 63, -51, 52, 52, -51, 63, -32, 45, -18};
  CHECK(engine.lifted_u(row) == u_expected);
  CHECK(engine.lifted_v() == v_expected);
  CHECK(engine.lifted_v()[0] == 1);

  // The lifted product stays far inside the proven bound.
  i128 worst = 0;
  auto prod = oracle::schoolbook(std::vector<i128>(u_expected.begin(), u_expected.end()),
                                 std::vector<i128>(v_expected.begin(), v_expected.end()));
  for (auto c : prod) worst = std::max(worst, c < 0 ? -c : c);
  CHECK(worst <= product_bound(131));
}

TEST_CASE("product_bound") {
  CHECK(product_bound(131) == i128{131} * 131 * 131 / 8);
  const u64 big = 2147483647;
  CHECK(product_bound(big) == static_cast<i128>(big) * big * big / 8);
}

TEST_CASE("BluesteinRow matches the direct DFT") {
  std::mt19937_64 rng(5);
  for (u64 p : {11u, 13u, 131u, 367u, 859u, 1999u}) {
    auto ctx = pipeline::classify_prime(p, pipeline::Strategy::Umbrella);
    const arith::Barrett bp(p);
    BluesteinRow engine(ctx.n, ctx.xi, bp);
    const u64 root = oracle::mulm(ctx.xi, ctx.xi, p);
    std::vector<u64> out(ctx.n);
    std::uniform_int_distribution<i64> d(-2, 2);
    for (int trial = 0; trial < 4; ++trial) {
      std::vector<i64> x(ctx.n);
      for (auto& v : x) v = 2 * d(rng);
      engine.apply(x, out);
      CHECK(out == oracle::direct_dft(as_residues(x, p), root, p));
    }
    std::vector<i64> impulse(ctx.n, 0);
    impulse[0] = 2;
    engine.apply(impulse, out);
    CHECK(out == std::vector<u64>(ctx.n, 2));
  }
}

TEST_CASE("every prime below 2000 agrees with the direct DFT under the umbrella") {
  for (u64 p : arith::primes_in_range(5, 2000)) {
    auto ctx = pipeline::classify_prime(p, pipeline::Strategy::Umbrella);
    REQUIRE(ctx.strategy == pipeline::Strategy::Umbrella);
    auto layout = pipeline::build_layout(ctx);
    pipeline::horizontal_dfts(ctx, layout);
    const u64 root = oracle::mulm(ctx.xi, ctx.xi, p);
    bool ok = true;
    for (std::size_t i2 = 0; i2 < ctx.m && ok; ++i2) {
      std::vector<u64> row(ctx.n);
      for (std::size_t k = 0; k < ctx.n; ++k) row[k] = oracle::to_residue(layout.a(i2, k), p);
      auto want = oracle::direct_dft(row, root, p);
      for (std::size_t l = 0; l < ctx.n; ++l) ok = ok && layout.d[i2 * ctx.n + l] == want[l];
    }
    INFO("p = " << p);
    CHECK(ok);
  }
}

TEST_CASE("transform count is 4m + 2 with two primes") {
  u64 large = 3000001;
  while (!arith::is_prime(large) || arith::smooth_split((large - 1) / 2).m > 6) large += 2;
  for (u64 p : {131ull, 211ull, 1999ull, static_cast<unsigned long long>(large)}) {
    auto ctx = pipeline::classify_prime(p, pipeline::Strategy::Umbrella);
    auto layout = pipeline::build_layout(ctx);
    BluesteinRow engine(ctx.n, ctx.xi, arith::Barrett(p));
    const std::size_t primes = engine.prime_count();
    CHECK(primes == (p == large ? 2u : 1u));
    CHECK(engine.transforms_issued() == primes);
    std::vector<i64> row(ctx.n);
    std::vector<u64> out(ctx.n);
    for (std::size_t i2 = 0; i2 < ctx.m; ++i2) {
      for (std::size_t k = 0; k < ctx.n; ++k) row[k] = layout.a(i2, k);
      engine.apply(row, out);
    }
    CHECK(engine.transforms_issued() == primes * (2 * ctx.m + 1));
    if (primes == 2) CHECK(engine.transforms_issued() == 4 * ctx.m + 2);
  }
}

TEST_CASE("cached operand is reused across rows") {
  auto ctx = pipeline::classify_prime(131, pipeline::Strategy::Umbrella);
  BluesteinRow a(ctx.n, ctx.xi, arith::Barrett(131));
  BluesteinRow b(ctx.n, ctx.xi, arith::Barrett(131));
  auto layout = pipeline::build_layout(ctx);
  std::vector<i64> row(ctx.n);
  std::vector<u64> out1(ctx.n), out2(ctx.n);
  for (std::size_t i2 = 0; i2 < ctx.m; ++i2) {
    for (std::size_t k = 0; k < ctx.n; ++k) row[k] = layout.a(i2, k);
    a.apply(row, out1);
    a.apply(row, out2);
    CHECK(out1 == out2);
    b.apply(row, out2);
    CHECK(out1 == out2);
  }
  CHECK(a.lifted_v() == b.lifted_v());
}
