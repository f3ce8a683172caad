#pragma once

// Number-theoretic transforms over word-sized primes, multi-dimensional
// cyclic/zero-padded convolution, and exact integer polynomial products
// reconstructed from one or two primes.

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "irreg/arith.hpp"

namespace irreg::ntt {

struct NoPrimeFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct BoundOverflow : std::overflow_error {
  using std::overflow_error::overflow_error;
};

/// A prime q with a stored root of unity of order 2^two_adic * cyclic_factor.
struct NttPlan {
  u64 q = 0;
  unsigned two_adic = 0;
  u64 cyclic_factor = 1;
  u64 root = 1;

  u64 root_order() const { return (u64{1} << two_adic) * cyclic_factor; }
  /// Primitive root of unity of the given order; throws ShapeMismatch when
  /// the order does not divide root_order().
  u64 root_of_order(u64 order) const;
};

/// Largest prime q < 2^bits with q == 1 mod 2^ceil(log2 two_adic_len) *
/// cyclic_factor. Throws NoPrimeFound if none appears in a fixed window.
NttPlan find_ntt_prime(u64 two_adic_len, u64 cyclic_factor, unsigned bits = 62);

/// The two fixed 62-bit primes used for umbrella products and single-prime
/// Rader products. Both are == 1 mod 2^31, enough for every length needed
/// with p < 2^31.
const NttPlan& umbrella_prime(int index);

enum class DimKind { zero_padded, cyclic };

struct Dim {
  std::size_t length;
  DimKind kind;
};

/// Row-major array shape; dims[0] varies slowest.
struct ConvShape {
  std::vector<Dim> dims;

  std::size_t size() const;
};

enum class Direction { forward, inverse };

namespace detail {
class DimKernel;
}

/// Precomputed tables for transforming arrays of one shape under one plan.
/// Not thread-safe; give each worker its own instance.
class Transformer {
 public:
  Transformer(const NttPlan& plan, ConvShape shape);
  ~Transformer();
  Transformer(Transformer&&) noexcept;
  Transformer& operator=(Transformer&&) noexcept;

  const NttPlan& plan() const { return plan_; }
  const ConvShape& shape() const { return shape_; }
  const arith::Montgomery& field() const { return mont_; }

  /// In-place transforms. With natural_order = false power-of-two dimensions
  /// are left in bit-reversed order, which forward/inverse pairs tolerate.
  void forward(std::span<u64> data, bool natural_order = true);
  void inverse(std::span<u64> data, bool natural_order = true);

  /// a[i] <- a[i] * b[i] where b was passed through to_pointwise_operand.
  void pointwise(std::span<u64> a, std::span<const u64> b) const;
  void to_pointwise_operand(std::span<u64> b) const;

 private:
  void apply(std::span<u64> data, bool inverse, bool natural_order);

  NttPlan plan_;
  ConvShape shape_;
  arith::Montgomery mont_;
  std::vector<std::unique_ptr<detail::DimKernel>> kernels_;
};

std::vector<u64> transform(const NttPlan& plan, std::span<const u64> data,
                           const ConvShape& shape, Direction direction);

/// Convolution mod q, cyclic in every dimension of the given (already
/// padded) shape; zero-padded dimensions therefore yield acyclic products
/// as long as inputs leave enough headroom.
std::vector<u64> convolve_multidim(const NttPlan& plan, std::span<const u64> a,
                                   std::span<const u64> b, const ConvShape& shape);

struct SignedCoeffs {
  std::vector<i128> coefficients;
  i128 bound = 0;
};

/// Signed x in (-q1 q2 / 2, q1 q2 / 2] with x == r1 mod q1, x == r2 mod q2.
i128 crt_pair(u64 r1, u64 q1, u64 r2, u64 q2);
i128 crt_pair(u64 r1, u64 r2);  // with the two umbrella primes

/// Plans needed to recover integers of absolute value <= bound.
std::vector<NttPlan> plans_for_bound(i128 bound);

/// Exact products of integer arrays against one fixed operand, whose
/// transforms are computed once. The fixed operand and every input are laid
/// out in the full (padded) shape.
class ExactConvolver {
 public:
  ExactConvolver(std::vector<NttPlan> plans, ConvShape shape, std::span<const i64> fixed);

  const ConvShape& shape() const { return shape_; }
  std::size_t prime_count() const { return transformers_.size(); }
  std::size_t transforms_issued() const { return transforms_; }

  /// Exact integer product (cyclic in the padded shape).
  std::vector<i128> multiply(std::span<const i64> input);
  /// Exact product reduced modulo p, written to out (same size as shape).
  void multiply_mod(std::span<const i64> input, const arith::Barrett& p, std::span<u64> out);

 private:
  void residues(std::span<const i64> input);

  ConvShape shape_;
  std::vector<Transformer> transformers_;
  std::vector<std::vector<u64>> fixed_hat_;
  std::vector<std::vector<u64>> work_;
  i128 q1_inv_q2_ = 0;
  std::size_t transforms_ = 0;
};

/// Exact product of integer polynomials; out_bound must dominate every
/// product coefficient in absolute value.
SignedCoeffs poly_mul_integer(const SignedCoeffs& a, const SignedCoeffs& b, i128 out_bound);

std::size_t next_pow2(std::size_t x);

}  // namespace irreg::ntt
