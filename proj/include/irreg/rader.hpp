#pragma once

// Prime-length DFTs over Z/pZ via Rader's reduction to a cyclic
// convolution, and composite length n1*n2 rows via a three-dimensional
// cyclic decomposition of (Z/nZ)^*.

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "irreg/arith.hpp"
#include "irreg/ntt.hpp"

namespace irreg::rader {

struct Rejected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RaderPlan {
  u64 n = 0;
  u64 z = 0;  // generator of (Z/nZ)^*
  u64 M = 0;  // z^M == y (mod n)
  u64 y = 0;  // 2 or 3
  std::vector<u32> perm_in;   // perm_in[s] = z^{-s} mod n
  std::vector<u32> perm_out;  // perm_out[t] = z^t mod n
};

/// Throws Rejected when neither 2 nor 3 has order at least (n-1)/100.
RaderPlan build_rader_plan(u64 n, u64 max_exponent = 100);

/// start^{z^s mod n} for s < length: M direct powers, then one y-th power
/// per term.
std::vector<u64> gen_geometric(u64 start, const RaderPlan& plan, std::size_t length,
                               const arith::Barrett& p);

/// Length-n DFT out[l] = sum_k root^{kl} x_k mod p for integer inputs with
/// |x_k| <= input_bound, using one cached transform of the root sequence.
class RaderDft {
 public:
  RaderDft(const RaderPlan& plan, u64 root, const arith::Barrett& p, i64 input_bound);

  void apply(std::span<const i64> x, std::span<u64> out);

  /// The permuted input U_s = x_{z^{-s}}, s < n-1.
  std::vector<i64> lifted_u(std::span<const i64> x) const;
  /// The root sequence V_s = root^{z^s}, lifted to (-p/2, p/2).
  const std::vector<i64>& lifted_v() const { return v_; }

  std::size_t length() const { return plan_.n; }
  std::size_t prime_count() const { return conv_->prime_count(); }

 private:
  RaderPlan plan_;
  arith::Barrett p_;
  std::vector<i64> v_;
  std::optional<ntt::ExactConvolver> conv_;
  std::vector<i64> u_;
  std::vector<u64> w_;
};

struct DeSplit {
  u64 n1 = 0, n2 = 0;
  u64 d1 = 1, e1 = 1, d2 = 1, e2 = 1;
  u64 u0 = 1, u1 = 1, u2 = 1;  // orders d1*d2, e1, e2
  ntt::NttPlan conv_plan;      // q == 1 mod 2^a * e1 * e2
};

/// Requires distinct primes n1 < n2. Throws Rejected when e1*e2 exceeds
/// max_cyclic, is not 7-smooth, or no convolution prime exists.
DeSplit build_de_split(u64 n1, u64 n2, u64 max_cyclic = u64{1} << 16);

/// Row DFT of length n = n1*n2 with root omega (order n).
class Rader2Row {
 public:
  Rader2Row(const DeSplit& split, const RaderPlan& plan1, const RaderPlan& plan2, u64 omega,
            const arith::Barrett& p);

  void apply(std::span<const i64> row, std::span<u64> out);

 private:
  DeSplit split_;
  arith::Barrett p_;
  std::size_t n_;
  std::size_t dd_;      // d1*d2
  std::size_t ee_;      // e1*e2
  std::size_t padded_;  // zero-padded length of the d1*d2 dimension
  RaderDft dft1_, dft2_;
  std::vector<u32> unit_index_;  // u^{-s} mod n in convolution layout
  std::vector<u32> out_index_;   // u^{t} mod n in convolution layout
  std::vector<u32> out_mod1_, out_mod2_;  // out_index_ reduced mod n1 and n2
  std::vector<u32> slot_;        // position in the padded convolution array
  std::optional<ntt::ExactConvolver> conv_;
  std::vector<i64> sums1_, sums2_, x1_, x2_, big_;
  std::vector<u64> r1_, r2_, t1_, t2_, conv_out_;
};

}  // namespace irreg::rader
