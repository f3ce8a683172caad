#pragma once

// Bluestein row DFT valid for every prime: a chirp-twisted convolution of
// length n lifted to the integers and recovered from one or two 62-bit
// primes.

#include <optional>
#include <span>
#include <vector>

#include "irreg/arith.hpp"
#include "irreg/ntt.hpp"

namespace irreg::umbrella {

/// Row transform out[l] = sum_k xi^{2kl} x_k mod p for xi of order n. Inputs
/// are the scaled values 2 f(.); the half is applied before the chirp.
class BluesteinRow {
 public:
  /// Builds the chirp tables and transforms V once per NTT prime.
  BluesteinRow(std::size_t n, u64 xi, const arith::Barrett& p);

  void apply(std::span<const i64> row, std::span<u64> out);

  /// U_k = xi^{k^2} x_k / 2, lifted to (-p/2, p/2).
  std::vector<i64> lifted_u(std::span<const i64> row) const;
  /// V_k = xi^{-k^2}, lifted to (-p/2, p/2).
  const std::vector<i64>& lifted_v() const { return v_; }

  std::size_t prime_count() const { return conv_->prime_count(); }
  std::size_t transforms_issued() const { return conv_->transforms_issued(); }

 private:
  void fill_u(std::span<const i64> row, std::span<i64> u) const;

  std::size_t n_;
  arith::Barrett p_;
  u64 half_;
  std::vector<u32> chirp_;  // xi^{k^2}
  std::vector<i64> v_;
  std::optional<ntt::ExactConvolver> conv_;
  std::vector<i64> u_;
  std::vector<u64> w_;
};

/// The provable coefficient bound p^3/8 on the lifted product.
i128 product_bound(u64 p);

}  // namespace irreg::umbrella
