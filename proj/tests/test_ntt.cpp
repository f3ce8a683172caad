#include <random>

#include "doctest.h"
#include "irreg/ntt.hpp"
#include "oracles.hpp"

using namespace irreg;
using namespace irreg::ntt;

namespace {

ConvShape shape_of(std::initializer_list<std::pair<std::size_t, DimKind>> dims) {
  ConvShape s;
  for (auto [len, kind] : dims) s.dims.push_back({len, kind});
  return s;
}

}  // namespace

TEST_CASE("find_ntt_prime") {
  auto a = find_ntt_prime(8, 1, 6);
  CHECK(a.q == 41);
  CHECK(a.two_adic == 3);
  // No larger prime below 64 is 1 mod 8.
  for (u64 q = 42; q < 64; ++q) CHECK_FALSE((arith::is_prime(q) && q % 8 == 1));

  auto b = find_ntt_prime(u64{1} << 22, 1, 62);
  CHECK(b.q % (u64{1} << 22) == 1);
  CHECK(arith::is_prime(b.q));
  CHECK(b.q < (u64{1} << 62));
  CHECK(arith::pow_mod(b.root, u64{1} << 22, b.q) == 1);
  CHECK(arith::pow_mod(b.root, u64{1} << 21, b.q) != 1);

  auto c = find_ntt_prime(4, 3, 6);
  CHECK(c.q == 61);
  CHECK(oracle::order_by_enumeration(c.root, c.q) == 12);

  CHECK_THROWS_AS(find_ntt_prime(64, 1, 6), NoPrimeFound);
}

TEST_CASE("umbrella primes") {
  const auto& p1 = umbrella_prime(0);
  const auto& p2 = umbrella_prime(1);
  CHECK(p1.q == 4611685941117976577ULL);
  CHECK(p2.q == 4611685917495656449ULL);
  CHECK(p1.two_adic == 31);
  CHECK(arith::pow_mod(p1.root, u64{1} << 30, p1.q) == p1.q - 1);
}

TEST_CASE("transform basics") {
  auto plan = find_ntt_prime(8, 3, 62);
  for (std::size_t len : {8u, 12u, 24u}) {
    auto shape = shape_of({{len, DimKind::cyclic}});
    std::vector<u64> zero(len, 0);
    CHECK(transform(plan, zero, shape, Direction::forward) == zero);
    std::vector<u64> impulse(len, 0);
    impulse[0] = 1;
    CHECK(transform(plan, impulse, shape, Direction::forward) == std::vector<u64>(len, 1));
    // Forward evaluates at the natural root grid.
    std::vector<u64> x(len);
    for (std::size_t i = 0; i < len; ++i) x[i] = i * i + 3;
    CHECK(transform(plan, x, shape, Direction::forward) ==
          oracle::direct_dft(x, plan.root_of_order(len), plan.q));
  }
  CHECK_THROWS_AS(transform(plan, std::vector<u64>(7), shape_of({{8, DimKind::cyclic}}),
                            Direction::forward),
                  ShapeMismatch);
  CHECK_THROWS_AS(Transformer(plan, shape_of({{12, DimKind::zero_padded}})), ShapeMismatch);
  CHECK_THROWS_AS(Transformer(plan, shape_of({{11, DimKind::cyclic}})), ShapeMismatch);
}

TEST_CASE("round trip on random vectors") {
  auto plan = find_ntt_prime(8, 3, 62);
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t len = std::array<std::size_t, 3>{8, 12, 24}[trial % 3];
    auto shape = shape_of({{len, DimKind::cyclic}});
    std::vector<u64> x(len);
    for (auto& v : x) v = rng() % plan.q;
    auto y = transform(plan, transform(plan, x, shape, Direction::forward), shape, Direction::inverse);
    REQUIRE(y == x);
  }
}

TEST_CASE("round trip over random shapes up to 2^12") {
  auto plan = find_ntt_prime(u64{1} << 12, 3 * 3 * 5 * 7, 62);
  std::mt19937_64 rng(2);
  const std::vector<std::size_t> lens{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 14, 15, 16, 21, 32, 45, 64};
  for (int trial = 0; trial < 200; ++trial) {
    ConvShape shape;
    std::size_t total = 1;
    int ndims = 1 + static_cast<int>(rng() % 3);
    for (int d = 0; d < ndims; ++d) {
      std::size_t len = lens[rng() % lens.size()];
      if (total * len > 4096) len = 1;
      total *= len;
      shape.dims.push_back({len, (len & (len - 1)) == 0 && rng() % 2 ? DimKind::zero_padded
                                                                     : DimKind::cyclic});
    }
    std::vector<u64> x(total);
    for (auto& v : x) v = rng() % plan.q;
    auto y = transform(plan, transform(plan, x, shape, Direction::forward), shape, Direction::inverse);
    REQUIRE(y == x);
  }
  // A long power-of-two length exercises the cache-blocked recursion.
  auto shape = shape_of({{std::size_t{1} << 14, DimKind::zero_padded}});
  auto big = find_ntt_prime(std::size_t{1} << 14, 1, 62);
  std::vector<u64> x(std::size_t{1} << 14);
  for (auto& v : x) v = rng() % big.q;
  CHECK(transform(big, transform(big, x, shape, Direction::forward), shape, Direction::inverse) == x);
}

TEST_CASE("transform linearity") {
  auto plan = find_ntt_prime(16, 5, 62);
  auto shape = shape_of({{16, DimKind::zero_padded}, {5, DimKind::cyclic}});
  std::mt19937_64 rng(3);
  std::vector<u64> x(80), y(80), z(80);
  u64 alpha = rng() % plan.q, beta = rng() % plan.q;
  for (std::size_t i = 0; i < 80; ++i) {
    x[i] = rng() % plan.q;
    y[i] = rng() % plan.q;
    z[i] = (oracle::mulm(alpha, x[i], plan.q) + oracle::mulm(beta, y[i], plan.q)) % plan.q;
  }
  auto fx = transform(plan, x, shape, Direction::forward);
  auto fy = transform(plan, y, shape, Direction::forward);
  auto fz = transform(plan, z, shape, Direction::forward);
  for (std::size_t i = 0; i < 80; ++i) {
    REQUIRE(fz[i] == (oracle::mulm(alpha, fx[i], plan.q) + oracle::mulm(beta, fy[i], plan.q)) % plan.q);
  }
}

TEST_CASE("convolve_multidim small cases") {
  auto plan = find_ntt_prime(8, 3, 62);
  const u64 q = plan.q;
  auto zp = shape_of({{4, DimKind::zero_padded}});
  auto r = convolve_multidim(plan, std::vector<u64>{1, 1, 0, 0}, std::vector<u64>{1, q - 1, 0, 0}, zp);
  CHECK(r == std::vector<u64>{1, 0, q - 1, 0});

  auto cyc = shape_of({{3, DimKind::cyclic}});
  r = convolve_multidim(plan, std::vector<u64>{0, 0, 1}, std::vector<u64>{0, 0, 1}, cyc);
  CHECK(r == std::vector<u64>{0, 1, 0});

  std::mt19937_64 rng(4);
  auto mixed = shape_of({{4, DimKind::zero_padded}, {3, DimKind::cyclic}});
  std::vector<u64> a(12, 0), b(12, 0);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      a[i * 3 + j] = rng() % q;
      b[i * 3 + j] = rng() % q;
    }
  CHECK(convolve_multidim(plan, a, b, mixed) == oracle::brute_convolution(a, b, {4, 3}, q));
}

TEST_CASE("convolution theorem against nested loops") {
  auto plan = find_ntt_prime(u64{1} << 10, 3 * 5 * 7, 62);
  std::mt19937_64 rng(6);
  const std::vector<std::size_t> lens{1, 2, 3, 4, 5, 6, 7, 8, 12, 15, 16, 21};
  for (int trial = 0; trial < 60; ++trial) {
    ConvShape shape;
    std::vector<std::size_t> dims;
    std::size_t total = 1;
    int ndims = 1 + static_cast<int>(rng() % 3);
    for (int d = 0; d < ndims; ++d) {
      std::size_t len = lens[rng() % lens.size()];
      if (total * len > 1024) len = 1;
      total *= len;
      dims.push_back(len);
      shape.dims.push_back({len, DimKind::cyclic});
    }
    std::vector<u64> a(total), b(total);
    for (auto& v : a) v = rng() % plan.q;
    for (auto& v : b) v = rng() % plan.q;
    REQUIRE(convolve_multidim(plan, a, b, shape) == oracle::brute_convolution(a, b, dims, plan.q));
  }
}

TEST_CASE("crt_pair") {
  const u64 q1 = umbrella_prime(0).q, q2 = umbrella_prime(1).q;
  CHECK(crt_pair(0, 0) == 0);
  CHECK(crt_pair(q1 - 1, q2 - 1) == -1);
  std::mt19937_64 rng(8);
  const i128 half = static_cast<i128>(static_cast<u128>(q1) * q2 / 2);
  for (int i = 0; i < 10000; ++i) {
    i128 x = (static_cast<i128>(rng() >> 2) << 60 | static_cast<i128>(rng() >> 4)) % half;
    if (rng() & 1) x = -x;
    REQUIRE(crt_pair(oracle::to_residue(x, q1), oracle::to_residue(x, q2)) == x);
  }
}

TEST_CASE("poly_mul_integer") {
  SignedCoeffs a{{1, 1}, 1}, b{{1, -1}, 1};
  auto r = poly_mul_integer(a, b, 2);
  CHECK(r.coefficients == std::vector<i128>{1, 0, -1});
  CHECK_THROWS_AS(poly_mul_integer(a, b, static_cast<i128>(1) << 125), BoundOverflow);
  CHECK_THROWS(poly_mul_integer(SignedCoeffs{{}, 1}, b, 2));

  std::mt19937_64 rng(9);
  auto random_poly = [&](std::size_t len, i128 bound) {
    SignedCoeffs c;
    c.bound = bound;
    for (std::size_t i = 0; i < len; ++i) {
      i128 v = static_cast<i128>(static_cast<u128>(rng()) << 64 | rng()) % (bound + 1);
      c.coefficients.push_back(rng() & 1 ? v : -v);
    }
    return c;
  };
  // Random degree-200 pair with bound 2^30.
  {
    auto x = random_poly(201, i128{1} << 30), y = random_poly(201, i128{1} << 30);
    auto w = poly_mul_integer(x, y, 201 * (i128{1} << 60));
    CHECK(w.coefficients == oracle::schoolbook(x.coefficients, y.coefficients));
  }
  // One-prime path (bounds up to 2^45 total) and two-prime path (up to 2^90).
  for (int trial = 0; trial < 1000; ++trial) {
    bool two = trial % 2;
    std::size_t la = 1 + rng() % 40, lb = 1 + rng() % 40;
    i128 ba = two ? (i128{1} << 40) : (i128{1} << 18);
    i128 bb = two ? (i128{1} << 44) : (i128{1} << 20);
    auto x = random_poly(la, ba), y = random_poly(lb, bb);
    i128 bound = static_cast<i128>(std::min(la, lb)) * ba * bb;
    REQUIRE(plans_for_bound(bound).size() == (two ? 2u : 1u));
    auto w = poly_mul_integer(x, y, bound);
    REQUIRE(w.coefficients == oracle::schoolbook(x.coefficients, y.coefficients));
  }
}

TEST_CASE("ExactConvolver reuses the fixed transform") {
  std::mt19937_64 rng(10);
  std::vector<i64> v(50), u(50);
  for (auto& x : v) x = static_cast<i64>(rng() % 2001) - 1000;
  ExactConvolver conv(plans_for_bound(i128{1} << 70), {{{128, DimKind::zero_padded}}}, v);
  CHECK(conv.prime_count() == 2);
  CHECK(conv.transforms_issued() == 2);
  for (int row = 0; row < 3; ++row) {
    for (auto& x : u) x = static_cast<i64>(rng() % 2001) - 1000;
    auto w = conv.multiply(u);
    std::vector<i128> uu(u.begin(), u.end()), vv(v.begin(), v.end());
    auto ref = oracle::schoolbook(uu, vv);
    ref.resize(128, 0);
    REQUIRE(w == ref);
    std::vector<u64> mod(128);
    conv.multiply_mod(u, arith::Barrett(131), mod);
    for (std::size_t i = 0; i < 128; ++i) REQUIRE(mod[i] == oracle::to_residue(ref[i], 131));
  }
  CHECK(conv.transforms_issued() == 2 + 3 * 2 * 2 * 2);  // two calls per row, two primes
}
