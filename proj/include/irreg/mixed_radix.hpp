#pragma once

// In-order mixed-radix DFT for 7-smooth lengths over a prime field, using
// small direct butterflies of length 2, 3, 5 and 7.

#include <array>
#include <span>
#include <stdexcept>
#include <vector>

#include "irreg/arith.hpp"

namespace irreg {

/// Field policy over a Barrett-reduced modulus below 2^32.
struct BarrettField {
  arith::Barrett mod;

  u64 modulus() const { return mod.modulus(); }
  u64 prepare(u64 w) const { return w; }
  u64 mul(u64 x, u64 w) const { return mod.mul(x, w); }
  u64 add(u64 a, u64 b) const { return mod.add(a, b); }
  u64 sub(u64 a, u64 b) const { return mod.sub(a, b); }
};

/// Field policy over a Montgomery modulus below 2^62; prepared constants are
/// kept in Montgomery form so mul() maps canonical residues to canonical
/// residues.
struct MontgomeryField {
  arith::Montgomery mont;

  u64 modulus() const { return mont.modulus(); }
  u64 prepare(u64 w) const { return mont.to_mont(w); }
  u64 mul(u64 x, u64 w) const { return mont.normalize(mont.mul(x, w)); }
  u64 add(u64 a, u64 b) const {
    u64 s = a + b;
    return s >= modulus() ? s - modulus() : s;
  }
  u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + modulus() - b; }
};

/// Radices 2, 3, 5, 7 in the order they are peeled; empty on failure.
inline std::vector<unsigned> smooth_radices(u64 length) {
  std::vector<unsigned> radices;
  for (unsigned r : {2u, 3u, 5u, 7u}) {
    while (length % r == 0) {
      radices.push_back(r);
      length /= r;
    }
  }
  if (length != 1) radices.clear();
  return radices;
}

template <class Field>
class MixedRadixDft {
 public:
  /// root must have exact multiplicative order `length`.
  MixedRadixDft(Field field, std::size_t length, u64 root)
      : f_(field), len_(length), radices_(smooth_radices(length)) {
    if (length == 0 || (length > 1 && radices_.empty())) {
      throw std::invalid_argument("MixedRadixDft: length must be 7-smooth");
    }
    const u64 q = f_.modulus();
    pw_.resize(len_);
    u64 x = 1 % q;
    for (std::size_t e = 0; e < len_; ++e) {
      pw_[e] = f_.prepare(x);
      x = arith::mul_mod(x, root, q);
    }
    if (x != 1 % q) throw std::invalid_argument("MixedRadixDft: root order mismatch");
    inv_len_ = f_.prepare(arith::inv_mod(len_ % q, q));
    scratch_.resize(len_);
  }

  std::size_t length() const { return len_; }

  /// out[k] = sum_i data[i] root^{ik}.
  void forward(std::span<u64> data) { run(data, false); }
  /// Inverse of forward(), including the 1/length factor.
  void inverse(std::span<u64> data) {
    run(data, true);
    for (auto& x : data) x = f_.mul(x, inv_len_);
  }

 private:
  void run(std::span<u64> data, bool inv) {
    if (data.size() != len_) throw std::invalid_argument("MixedRadixDft: length mismatch");
    if (len_ == 1) return;
    std::copy(data.begin(), data.end(), scratch_.begin());
    rec(scratch_.data(), 1, data.data(), len_, 0, 1, inv);
  }

  u64 twiddle(std::size_t e, bool inv) const { return inv ? pw_[(len_ - e) % len_] : pw_[e]; }

  // Decimation in time: splits the input into R interleaved subsequences,
  // transforms each, then recombines with R-point butterflies.
  void rec(const u64* in, std::size_t stride, u64* out, std::size_t len, std::size_t level,
           std::size_t step, bool inv) {
    if (len == 1) {
      out[0] = in[0];
      return;
    }
    const unsigned radix = radices_[level];
    const std::size_t sub = len / radix;
    for (unsigned r = 0; r < radix; ++r) {
      rec(in + r * stride, stride * radix, out + r * sub, sub, level + 1, step * radix, inv);
    }
    const std::size_t unit = len_ / radix;  // exponent of the radix-th root
    std::array<u64, 7> t{};
    for (std::size_t k = 0; k < sub; ++k) {
      t[0] = out[k];
      for (unsigned r = 1; r < radix; ++r) {
        t[r] = f_.mul(out[r * sub + k], twiddle(step * r * k, inv));
      }
      for (unsigned s = 0; s < radix; ++s) {
        u64 acc = t[0];
        for (unsigned r = 1; r < radix; ++r) {
          acc = f_.add(acc, f_.mul(t[r], twiddle(unit * ((r * s) % radix), inv)));
        }
        out[k + s * sub] = acc;
      }
    }
  }

  Field f_;
  std::size_t len_;
  std::vector<unsigned> radices_;
  std::vector<u64> pw_;
  u64 inv_len_ = 1;
  std::vector<u64> scratch_;
};

}  // namespace irreg
