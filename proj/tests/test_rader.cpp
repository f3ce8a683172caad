#include <random>

#include "doctest.h"
#include "irreg/pipeline.hpp"
#include "irreg/rader.hpp"
#include "oracles.hpp"

using namespace irreg;
using namespace irreg::rader;

namespace {

std::vector<u64> as_residues(const std::vector<i64>& x, u64 p) {
  std::vector<u64> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = oracle::to_residue(x[i], p);
  return out;
}

std::vector<i64> random_row(std::size_t n, std::mt19937_64& rng, i64 bound) {
  std::uniform_int_distribution<i64> d(-bound, bound);
  std::vector<i64> x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

/// Element of exact order n in (Z/pZ)^*, p == 1 mod n.
u64 root_of_order(u64 n, u64 p) {
  for (u64 g = 2;; ++g) {
    const u64 w = oracle::powm(g, (p - 1) / n, p);
    if (oracle::order_by_enumeration(w, p) == n) return w;
  }
}

}  // namespace

TEST_CASE("build_rader_plan") {
  auto a = build_rader_plan(13);
  CHECK(a.z == 2);
  CHECK(a.M == 1);
  CHECK(a.y == 2);
  CHECK(a.perm_out.size() == 12);
  CHECK(a.perm_out[1] == 2);
  CHECK(a.perm_in[1] == 7);  // 2^{-1} mod 13

  auto b = build_rader_plan(31);
  CHECK(b.y == 2);
  CHECK(b.M == 6);
  CHECK(oracle::powm(b.z, 6, 31) == 2);
  CHECK(oracle::order_by_enumeration(b.z, 31) == 30);

  // In (Z/73Z)^* 2 has order 9 and 3 has order 12, so M >= 6.
  CHECK_THROWS_AS(build_rader_plan(73, 5), Rejected);
  auto c = build_rader_plan(73, 6);
  CHECK(c.y == 3);
  CHECK(c.M == 6);
}

TEST_CASE("permutations are inverse bijections") {
  for (u64 n : {5u, 7u, 13u, 31u, 101u, 257u}) {
    auto plan = build_rader_plan(n);
    std::vector<bool> seen(n, false);
    for (std::size_t s = 0; s + 1 < n; ++s) {
      CHECK(plan.perm_out[s] == oracle::powm(plan.z, s, n));
      CHECK(oracle::mulm(plan.perm_in[s], plan.perm_out[s], n) == 1);
      seen[plan.perm_out[s]] = true;
    }
    for (u64 k = 1; k < n; ++k) CHECK(seen[k]);
  }
}

TEST_CASE("gen_geometric") {
  const arith::Barrett p(131);
  auto plan = build_rader_plan(13);
  const u64 omega = oracle::powm(2, 100, 131);
  CHECK(omega == 131 - 19);
  auto seq = gen_geometric(omega, plan, 12, p);
  CHECK(seq[0] == 131 - 19);
  CHECK(seq[1] == 99);
  CHECK(seq[1] == oracle::mulm(omega, omega, 131));

  CHECK(gen_geometric(omega, plan, 1, p) == std::vector<u64>{omega});

  // Direct exponentiation for a plan with M > 1.
  const u64 q = 311;  // 31 | 310
  const arith::Barrett bq(q);
  auto plan31 = build_rader_plan(31);
  const u64 w = root_of_order(31, q);
  auto g = gen_geometric(w, plan31, 30, bq);
  for (std::size_t s = 0; s < 30; ++s) {
    CHECK(g[s] == oracle::powm(w, oracle::powm(plan31.z, s, 31), q));
  }
}

TEST_CASE("lifted Rader polynomials for p = 131, row 3") {
  auto ctx = pipeline::classify_prime(131, pipeline::Strategy::Rader1);
  REQUIRE(ctx.strategy == pipeline::Strategy::Rader1);
  REQUIRE(ctx.plan1->z == 2);
  auto layout = pipeline::build_layout(ctx);
  std::vector<i64> row(ctx.n);
  for (std::size_t k = 0; k < ctx.n; ++k) row[k] = layout.a(3, k);

  RaderDft dft(*ctx.plan1, ctx.omega, arith::Barrett(131), 2);
  const std::vector<i64> u_expected = {-1, 1, 1, 1, -1, -1, 1, -1, 1, -1, -1, -1};
  const std::vector<i64> v_expected = {-19, -32, -24, 52, -47, -18, 62, 45, 60, 63, 39, -51};
  CHECK(dft.lifted_u(row) == u_expected);
  CHECK(dft.lifted_v() == v_expected);
  CHECK(dft.prime_count() == 1);
}

TEST_CASE("RaderDft matches the direct DFT") {
  std::mt19937_64 rng(7);
  for (auto [n, p] : {std::pair<u64, u64>{13, 131}, {31, 311}, {101, 607}, {257, 1543}}) {
    const u64 w = root_of_order(n, p);
    auto plan = build_rader_plan(n);
    RaderDft dft(plan, w, arith::Barrett(p), 2);
    std::vector<u64> out(n);
    for (int trial = 0; trial < 5; ++trial) {
      auto x = random_row(n, rng, 2);
      dft.apply(x, out);
      CHECK(out == oracle::direct_dft(as_residues(x, p), w, p));
    }
    std::vector<i64> impulse(n, 0);
    impulse[0] = 2;
    dft.apply(impulse, out);
    CHECK(out == std::vector<u64>(n, 2));
  }
}

TEST_CASE("build_de_split") {
  auto s = build_de_split(11, 13);
  CHECK(s.d1 == 5);
  CHECK(s.e1 == 2);
  CHECK(s.d2 == 12);
  CHECK(s.e2 == 1);

  auto t = build_de_split(10459, 19249);
  CHECK(t.d1 == 9 * 7 * 83);
  CHECK(t.e1 == 2);
  CHECK(t.d2 == 16 * 401);
  CHECK(t.e2 == 3);
  const u64 n = 10459 * 19249;
  CHECK(oracle::powm(t.u0, t.d1 * t.d2, n) == 1);
  for (u64 l : {2u, 3u, 7u, 83u, 401u}) CHECK(oracle::powm(t.u0, t.d1 * t.d2 / l, n) != 1);
  CHECK(oracle::powm(t.u1, 2, n) == 1);
  CHECK(t.u1 != 1);
  CHECK(t.conv_plan.q % (t.e1 * t.e2) == 1);

  // 22 = 2 * 11 and 67 - 1 = 2 * 3 * 11 share the prime 11.
  CHECK_THROWS_AS(build_de_split(23, 67, 8), Rejected);
}

TEST_CASE("Rader2Row matches the direct DFT") {
  auto ctx = pipeline::classify_prime(859);
  REQUIRE(ctx.strategy == pipeline::Strategy::Rader2);
  CHECK(ctx.m == 3);
  CHECK(ctx.n == 143);
  const arith::Barrett bp(859);
  Rader2Row engine(*ctx.split, *ctx.plan1, *ctx.plan2, ctx.omega, bp);

  auto layout = pipeline::build_layout(ctx);
  std::vector<i64> row(ctx.n);
  std::vector<u64> out(ctx.n);
  for (std::size_t i2 = 0; i2 < ctx.m; ++i2) {
    for (std::size_t k = 0; k < ctx.n; ++k) row[k] = layout.a(i2, k);
    engine.apply(row, out);
    CHECK(out == oracle::direct_dft(as_residues(row, 859), ctx.omega, 859));
  }

  std::fill(row.begin(), row.end(), 2);
  engine.apply(row, out);
  CHECK(out[0] == 2 * 143 % 859);
  for (std::size_t l = 1; l < ctx.n; ++l) CHECK(out[l] == 0);

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    row = random_row(ctx.n, rng, 2);
    engine.apply(row, out);
    CHECK(out == oracle::direct_dft(as_residues(row, 859), ctx.omega, 859));
  }
}

TEST_CASE("Rader2Row over other prime pairs") {
  std::mt19937_64 rng(3);
  // p == 1 mod 2 n1 n2 with p - 1 = 2 m n1 n2.
  for (auto [n1, n2] : {std::pair<u64, u64>{11, 13}, {13, 61}, {11, 31}, {41, 43}}) {
    u64 p = 0;
    for (u64 k = 1;; ++k) {
      if (arith::is_prime(2 * n1 * n2 * k + 1)) {
        p = 2 * n1 * n2 * k + 1;
        break;
      }
    }
    const u64 w = root_of_order(n1 * n2, p);
    auto split = build_de_split(n1, n2);
    Rader2Row engine(split, build_rader_plan(n1), build_rader_plan(n2), w, arith::Barrett(p));
    std::vector<u64> out(n1 * n2);
    for (i64 bound : {1, 2}) {
      auto row = random_row(n1 * n2, rng, bound);
      engine.apply(row, out);
      CHECK(out == oracle::direct_dft(as_residues(row, p), w, p));
    }
  }
}
