#include "irreg/umbrella.hpp"

#include <stdexcept>

namespace irreg::umbrella {

namespace {

i64 lift(u64 r, u64 p) {
  return r > p / 2 ? static_cast<i64>(r) - static_cast<i64>(p) : static_cast<i64>(r);
}

}  // namespace

i128 product_bound(u64 p) {
  const i128 pp = static_cast<i128>(p);
  return pp * pp * pp / 8;
}

BluesteinRow::BluesteinRow(std::size_t n, u64 xi, const arith::Barrett& p)
    : n_(n), p_(p), half_(arith::inv_mod(2, p.modulus())) {
  if (n == 0) throw std::invalid_argument("BluesteinRow: empty row");
  const u64 pm = p.modulus();
  const u64 xi_inv = arith::inv_mod(xi, pm);
  chirp_.resize(n);
  v_.resize(n);
  // xi^{(k+1)^2} = xi^{k^2} * xi^{2k+1}.
  const u64 xi2 = p.mul(xi, xi), xi_inv2 = p.mul(xi_inv, xi_inv);
  u64 c = 1, step = xi, ci = 1, step_inv = xi_inv;
  for (std::size_t k = 0; k < n; ++k) {
    chirp_[k] = static_cast<u32>(c);
    v_[k] = lift(ci, pm);
    c = p.mul(c, step);
    step = p.mul(step, xi2);
    ci = p.mul(ci, step_inv);
    step_inv = p.mul(step_inv, xi_inv2);
  }
  const std::size_t padded = ntt::next_pow2(2 * n);
  conv_.emplace(ntt::plans_for_bound(product_bound(pm)),
                ntt::ConvShape{{{padded, ntt::DimKind::zero_padded}}}, v_);
  u_.resize(n);
  w_.resize(padded);
}

void BluesteinRow::fill_u(std::span<const i64> row, std::span<i64> u) const {
  const u64 pm = p_.modulus();
  for (std::size_t k = 0; k < n_; ++k) {
    const u64 a = p_.mul(p_.from_signed(row[k]), half_);
    u[k] = lift(p_.mul(a, chirp_[k]), pm);
  }
}

std::vector<i64> BluesteinRow::lifted_u(std::span<const i64> row) const {
  if (row.size() != n_) throw std::invalid_argument("BluesteinRow: row length mismatch");
  std::vector<i64> u(n_);
  fill_u(row, u);
  return u;
}

void BluesteinRow::apply(std::span<const i64> row, std::span<u64> out) {
  if (row.size() != n_ || out.size() != n_) {
    throw std::invalid_argument("BluesteinRow: row length mismatch");
  }
  fill_u(row, u_);
  conv_->multiply_mod(u_, p_, w_);
  for (std::size_t l = 0; l < n_; ++l) {
    const u64 s = p_.add(w_[l], w_[l + n_]);
    out[l] = p_.mul(p_.add(s, s), chirp_[l]);
  }
}

}  // namespace irreg::umbrella
