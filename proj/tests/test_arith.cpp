#include <numeric>
#include <random>

#include "doctest.h"
#include "irreg/arith.hpp"
#include "oracles.hpp"

using namespace irreg;
using namespace irreg::arith;

TEST_CASE("pow_mod and inv_mod") {
  CHECK(pow_mod(2, 5, 131) == 32);
  CHECK(pow_mod(2, 130, 131) == 1);
  CHECK(pow_mod(77, 0, 131) == 1);
  CHECK(pow_mod(5, 0, 1000003) == 1);
  CHECK(inv_mod(2, 131) == 66);
  CHECK(inv_mod(6, 7) == 6);
  CHECK(inv_mod(1, 1000003) == 1);
  CHECK_THROWS_AS(inv_mod(6, 9), NotInvertible);
  CHECK_THROWS_AS(inv_mod(0, 7), NotInvertible);
}

TEST_CASE("pow_mod is exact for 62-bit moduli") {
  const u64 q = (u64{1} << 62) - 57;  // prime
  REQUIRE(is_prime(q));
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    u64 x = rng() % (q - 1) + 1;
    CHECK(pow_mod(x, q - 1, q) == 1);
    CHECK(mul_mod(x, inv_mod(x, q), q) == 1);
  }
}

TEST_CASE("factorize") {
  auto f = factorize(65);
  CHECK(f.factors == std::vector<PrimePower>{{5, 1}, {13, 1}});
  CHECK(factorize(10458).factors == std::vector<PrimePower>{{2, 1}, {3, 2}, {7, 1}, {83, 1}});
  CHECK(factorize(19248).factors == std::vector<PrimePower>{{2, 4}, {3, 1}, {401, 1}});
  CHECK(factorize(1).factors.empty());
  CHECK(factorize(4294967291ULL).factors == std::vector<PrimePower>{{4294967291ULL, 1}});
  CHECK_THROWS(factorize(0));
}

TEST_CASE("factorize reassembles its input") {
  auto check = [](u64 k) {
    auto f = factorize(k);
    u64 prod = 1;
    u64 last = 0;
    for (auto [prime, e] : f.factors) {
      REQUIRE(is_prime(prime));
      REQUIRE(e >= 1);
      REQUIRE(prime > last);
      last = prime;
      for (unsigned i = 0; i < e; ++i) prod *= prime;
    }
    REQUIRE(prod == k);
  };
  for (u64 k = 1; k < 100000; ++k) check(k);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) check(rng() % (u64{1} << 31) + 1);
}

TEST_CASE("is_prime") {
  CHECK(is_prime(1073741789));
  CHECK(is_prime(342283));
  CHECK_FALSE(is_prime(1));
  CHECK_FALSE(is_prime(0));
  CHECK(is_prime(2));
  CHECK_FALSE(is_prime(3215031751ULL));  // strong pseudoprime to bases 2, 3, 5, 7
  CHECK_FALSE(is_prime(3825123056546413051ULL));
  // Agreement with trial division on a prefix.
  for (u64 k = 0; k < 20000; ++k) {
    bool td = k >= 2;
    for (u64 d = 2; d * d <= k; ++d)
      if (k % d == 0) td = false;
    REQUIRE(is_prime(k) == td);
  }
}

TEST_CASE("smooth_split") {
  CHECK(smooth_split(65).m == 5);
  CHECK(smooth_split(65).n == 13);
  CHECK(smooth_split((2147483579ULL - 1) / 2).m == 1);
  CHECK(smooth_split((2147483579ULL - 1) / 2).n == 1073741789);
  CHECK(smooth_split((2147477873ULL - 1) / 2).m == 8);
  CHECK(smooth_split((2147477873ULL - 1) / 2).n == 134217367);
  for (u64 p = 3; p < 100000; p += 2) {
    if (!is_prime(p)) continue;
    auto [m, n] = smooth_split((p - 1) / 2);
    REQUIRE(m * n == (p - 1) / 2);
    REQUIRE(std::gcd(n, u64{210}) == 1);
    REQUIRE(std::gcd(2 * m, n) == 1);
  }
}

TEST_CASE("element_order") {
  CHECK(element_order(2, 31, factorize(30)) == 5);
  CHECK(element_order(2, 13, factorize(12)) == oracle::order_by_enumeration(2, 13));
  CHECK(element_order(2, 13, factorize(12)) == 12);
  CHECK(element_order(2, 131, factorize(130)) == 130);
  CHECK_THROWS_AS(element_order(0, 13, factorize(12)), ZeroElement);
}

TEST_CASE("element_order matches enumeration for p < 500") {
  for (u64 p = 3; p < 500; ++p) {
    if (!is_prime(p)) continue;
    auto phi = factorize(p - 1);
    for (u64 x = 1; x < p; ++x) {
      u64 ord = element_order(x, p, phi);
      REQUIRE(pow_mod(x, ord, p) == 1);
      REQUIRE(ord == oracle::order_by_enumeration(x, p));
    }
  }
}

TEST_CASE("primitive_root") {
  CHECK(primitive_root(131) == 2);
  CHECK(primitive_root(13) == 2);
  CHECK(primitive_root(7) == 3);
  for (u64 p = 3; p < 3000; p += 2) {
    if (!is_prime(p)) continue;
    u64 g = primitive_root(p);
    REQUIRE(oracle::order_by_enumeration(g, p) == p - 1);
    for (u64 h = 2; h < g; ++h) REQUIRE(oracle::order_by_enumeration(h, p) < p - 1);
  }
}

TEST_CASE("solve_power_generator") {
  auto a = solve_power_generator(13, 2, 100);
  CHECK(a.z == 2);
  CHECK(a.M == 1);

  auto b = solve_power_generator(31, 2, 100);
  CHECK(b.M == 6);
  CHECK(pow_mod(b.z, 6, 31) == 2);
  CHECK(oracle::order_by_enumeration(b.z, 31) == 30);
  // Smallest generator among the six roots of z^6 = 2, found by enumeration.
  u64 smallest = 0;
  for (u64 z = 1; z < 31 && smallest == 0; ++z)
    if (oracle::powm(z, 6, 31) == 2 && oracle::order_by_enumeration(z, 31) == 30) smallest = z;
  CHECK(b.z == smallest);

  CHECK_THROWS_AS(solve_power_generator(31, 30, 10), OrderTooSmall);
}

TEST_CASE("solve_power_generator always yields a generator root") {
  for (u64 n = 11; n < 20000; n += 2) {
    if (!is_prime(n)) continue;
    auto phi = factorize(n - 1);
    for (u64 y : {2, 3}) {
      u64 M = (n - 1) / element_order(y, n, phi);
      if (M > 100) {
        CHECK_THROWS_AS(solve_power_generator(n, y, 100), OrderTooSmall);
        continue;
      }
      auto r = solve_power_generator(n, y, 100);
      REQUIRE(r.M == M);
      REQUIRE(pow_mod(r.z, r.M, n) == y);
      REQUIRE(element_order(r.z, n, phi) == n - 1);
    }
  }
}

TEST_CASE("Barrett and Montgomery agree with direct reduction") {
  std::mt19937_64 rng(5);
  for (u64 p : {5ULL, 131ULL, 1000003ULL, 2147483647ULL, 4294967291ULL}) {
    Barrett b(p);
    for (int i = 0; i < 2000; ++i) {
      u64 x = rng(), y = rng() % p, z = rng() % p;
      REQUIRE(b.reduce(x) == x % p);
      REQUIRE(b.mul(y, z) == mul_mod(y, z, p));
      u64 rem;
      REQUIRE(b.divmod(x, rem) == x / p);
      REQUIRE(rem == x % p);
    }
  }
  for (u64 q : {u64{41}, u64{1000003}, (u64{1} << 62) - 57}) {
    Montgomery m(q);
    for (int i = 0; i < 2000; ++i) {
      u64 x = rng() % q, y = rng() % q;
      REQUIRE(m.mul_plain(x, y) == mul_mod(x, y, q));
      REQUIRE(m.from_mont(m.to_mont(x)) == x);
    }
    REQUIRE(m.pow_plain(3, q - 1) == 1);
  }
}
