#include "irreg/ntt.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "irreg/mixed_radix.hpp"

namespace irreg::ntt {

using arith::Montgomery;

std::size_t next_pow2(std::size_t x) { return x <= 1 ? 1 : std::bit_ceil(x); }

std::size_t ConvShape::size() const {
  std::size_t total = 1;
  for (const auto& d : dims) total *= d.length;
  return total;
}

u64 NttPlan::root_of_order(u64 order) const {
  const u64 full = root_order();
  if (order == 0 || full % order != 0) {
    throw ShapeMismatch("NttPlan: no root of order " + std::to_string(order) + " modulo " +
                        std::to_string(q));
  }
  return arith::pow_mod(root, full / order, q);
}

namespace {

unsigned ceil_log2(u64 x) { return x <= 1 ? 0 : static_cast<unsigned>(std::bit_width(x - 1)); }

constexpr u64 kSearchWindow = u64{1} << 20;

// Root of exact order 2^a * cf modulo the prime q.
u64 find_root(u64 q, unsigned a, u64 cf) {
  const u64 order = (u64{1} << a) * cf;
  std::vector<u64> primes = arith::factorize(cf).primes();
  if (a > 0 && std::find(primes.begin(), primes.end(), 2) == primes.end()) primes.push_back(2);
  for (u64 g = 2; g < q; ++g) {
    const u64 r = arith::pow_mod(g, (q - 1) / order, q);
    bool exact = true;
    for (u64 prime : primes) {
      if (arith::pow_mod(r, order / prime, q) == 1) {
        exact = false;
        break;
      }
    }
    if (exact) return r;
  }
  throw NoPrimeFound("find_root: no root of the requested order");
}

// Largest prime q = k * step + 1 with k <= k_start.
NttPlan search_prime(unsigned a, u64 cf, unsigned bits, u64 k_start) {
  const u64 step = (u64{1} << a) * cf;
  for (u64 tried = 0; k_start >= 1 && tried < kSearchWindow; --k_start, ++tried) {
    const u64 q = k_start * step + 1;
    if (arith::is_prime(q)) return NttPlan{q, a, cf, find_root(q, a, cf)};
  }
  throw NoPrimeFound("find_ntt_prime: no prime == 1 mod " + std::to_string(step) + " below 2^" +
                     std::to_string(bits));
}

}  // namespace

NttPlan find_ntt_prime(u64 two_adic_len, u64 cyclic_factor, unsigned bits) {
  if (bits < 2 || bits > 62 || cyclic_factor == 0) {
    throw std::invalid_argument("find_ntt_prime: bits must lie in [2, 62]");
  }
  const unsigned a = ceil_log2(two_adic_len);
  const u64 limit = u64{1} << bits;
  if (a >= bits || cyclic_factor >= (limit >> a)) {
    throw NoPrimeFound("find_ntt_prime: modulus structure does not fit in " +
                       std::to_string(bits) + " bits");
  }
  const u64 step = (u64{1} << a) * cyclic_factor;
  return search_prime(a, cyclic_factor, bits, (limit - 2) / step);
}

const NttPlan& umbrella_prime(int index) {
  static const std::array<NttPlan, 2> primes = [] {
    constexpr unsigned a = 31;
    NttPlan first = find_ntt_prime(u64{1} << a, 1, 62);
    NttPlan second = search_prime(a, 1, 62, (first.q - 1) / (u64{1} << a) - 1);
    return std::array<NttPlan, 2>{first, second};
  }();
  return primes.at(static_cast<std::size_t>(index));
}

namespace detail {

class DimKernel {
 public:
  explicit DimKernel(std::size_t length) : len_(length) {}
  virtual ~DimKernel() = default;
  virtual void forward(u64* a, bool natural) = 0;
  virtual void inverse(u64* a, bool natural) = 0;

  // Transforms `inner` interleaved lines: element k of line i sits at
  // a[k * inner + i].
  virtual void forward_batch(u64* a, std::size_t inner, bool natural) {
    gather(a, inner, [&](u64* line) { forward(line, natural); });
  }
  virtual void inverse_batch(u64* a, std::size_t inner, bool natural) {
    gather(a, inner, [&](u64* line) { inverse(line, natural); });
  }

 protected:
  template <class F>
  void gather(u64* a, std::size_t inner, F&& f) {
    line_.resize(len_);
    for (std::size_t i = 0; i < inner; ++i) {
      for (std::size_t k = 0; k < len_; ++k) line_[k] = a[k * inner + i];
      f(line_.data());
      for (std::size_t k = 0; k < len_; ++k) a[k * inner + i] = line_[k];
    }
  }

  std::size_t len_;
  std::vector<u64> line_;
};

namespace {

struct Pow2Tables {
  // tw[h + j] = w_{2h}^j and itw its inverse; the *_shoup arrays hold
  // floor(w 2^64 / q) for Shoup multiplication.
  std::vector<u64> tw, tw_shoup, itw, itw_shoup;
  std::vector<u32> rev;
  u64 scale = 0, scale_shoup = 0;
};

u64 shoup_of(u64 w, u64 q) { return static_cast<u64>((static_cast<u128>(w) << 64) / q); }

// x w mod q in [0, 2q) for any 64-bit x.
inline u64 shoup_mul(u64 x, u64 w, u64 ws, u64 q) {
  const u64 hi = static_cast<u64>((static_cast<u128>(x) * ws) >> 64);
  return x * w - hi * q;
}

std::shared_ptr<const Pow2Tables> build_pow2_tables(const NttPlan& plan, std::size_t len) {
  auto t = std::make_shared<Pow2Tables>();
  const u64 q = plan.q;
  const std::size_t size = std::max<std::size_t>(len, 2);
  t->tw.assign(size, 0);
  t->itw.assign(size, 0);
  t->tw_shoup.assign(size, 0);
  t->itw_shoup.assign(size, 0);
  for (std::size_t h = 1; h < len; h *= 2) {
    const u64 w = plan.root_of_order(2 * h);
    const u64 wi = arith::inv_mod(w, q);
    const u64 ws = shoup_of(w, q), wis = shoup_of(wi, q);
    u64 x = 1, y = 1;
    for (std::size_t j = 0; j < h; ++j) {
      t->tw[h + j] = x;
      t->itw[h + j] = y;
      t->tw_shoup[h + j] = shoup_of(x, q);
      t->itw_shoup[h + j] = shoup_of(y, q);
      x = shoup_mul(x, w, ws, q);
      x = x >= q ? x - q : x;
      y = shoup_mul(y, wi, wis, q);
      y = y >= q ? y - q : y;
    }
  }
  t->scale = arith::inv_mod(len % q, q);
  t->scale_shoup = shoup_of(t->scale, q);
  const int bits = std::countr_zero(len);
  t->rev.assign(len, 0);
  for (std::size_t i = 1; i < len; ++i) {
    t->rev[i] = static_cast<u32>((t->rev[i >> 1] >> 1) | ((i & 1) << (bits - 1)));
  }
  return t;
}

// Tables are shared between transformers of the same modulus and length.
// The cache is emptied whenever it outgrows kCacheBytes.
std::shared_ptr<const Pow2Tables> pow2_tables(const NttPlan& plan, std::size_t len) {
  constexpr std::size_t kCacheBytes = std::size_t{1} << 28;
  static std::mutex mu;
  static std::map<std::pair<u64, std::size_t>, std::shared_ptr<const Pow2Tables>> cache;
  static std::size_t bytes = 0;
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find({plan.q, len}); it != cache.end()) return it->second;
  }
  auto tables = build_pow2_tables(plan, len);
  const std::size_t size = len * (4 * sizeof(u64) + sizeof(u32));
  std::lock_guard lock(mu);
  if (bytes + size > kCacheBytes) {
    cache.clear();
    bytes = 0;
  }
  if (cache.emplace(std::pair{plan.q, len}, tables).second) bytes += size;
  return tables;
}

// Radix-2 kernel with lazy Shoup butterflies (values kept in [0, 2q)).
// Forward is decimation in frequency (output bit-reversed), inverse is
// decimation in time (input bit-reversed).
class Pow2Kernel final : public DimKernel {
 public:
  Pow2Kernel(const NttPlan& plan, std::size_t length)
      : DimKernel(length), q_(plan.q), two_q_(2 * plan.q), tables_(pow2_tables(plan, length)) {}

  void forward(u64* a, bool natural) override {
    if (len_ == 1) return;
    dif(a, len_);
    normalize(a, len_);
    if (natural) bit_reverse(a, 1);
  }

  void inverse(u64* a, bool natural) override {
    if (len_ == 1) return;
    if (natural) bit_reverse(a, 1);
    dit(a, len_);
    rescale(a, len_);
  }

  void forward_batch(u64* a, std::size_t inner, bool natural) override {
    if (len_ == 1) return;
    for (std::size_t h = len_ / 2; h >= 1; h /= 2) dif_stage(a, h, len_, inner);
    normalize(a, len_ * inner);
    if (natural) bit_reverse(a, inner);
  }

  void inverse_batch(u64* a, std::size_t inner, bool natural) override {
    if (len_ == 1) return;
    if (natural) bit_reverse(a, inner);
    for (std::size_t h = 1; h < len_; h *= 2) dit_stage(a, h, len_, inner);
    rescale(a, len_ * inner);
  }

 private:
  static constexpr std::size_t kBlock = std::size_t{1} << 12;

  void normalize(u64* a, std::size_t count) const {
    for (std::size_t i = 0; i < count; ++i) a[i] = a[i] >= q_ ? a[i] - q_ : a[i];
  }

  void rescale(u64* a, std::size_t count) const {
    const u64 s = tables_->scale, ss = tables_->scale_shoup;
    for (std::size_t i = 0; i < count; ++i) {
      const u64 r = shoup_mul(a[i], s, ss, q_);
      a[i] = r >= q_ ? r - q_ : r;
    }
  }

  void bit_reverse(u64* a, std::size_t inner) const {
    const auto& rev = tables_->rev;
    for (std::size_t i = 0; i < len_; ++i) {
      if (i < rev[i]) std::swap_ranges(a + i * inner, a + (i + 1) * inner, a + rev[i] * inner);
    }
  }

  void dif_stage(u64* a, std::size_t h, std::size_t span, std::size_t inner = 1) const {
    const u64* w = tables_->tw.data() + h;
    const u64* ws = tables_->tw_shoup.data() + h;
    const u64 q = q_, tq = two_q_;
    for (std::size_t blk = 0; blk < span; blk += 2 * h) {
      for (std::size_t j = 0; j < h; ++j) {
        u64* x = a + (blk + j) * inner;
        u64* y = x + h * inner;
        const u64 wj = w[j], wsj = ws[j];
        for (std::size_t i = 0; i < inner; ++i) {
          const u64 u = x[i], v = y[i];
          const u64 s = u + v;
          x[i] = s >= tq ? s - tq : s;
          y[i] = shoup_mul(u + tq - v, wj, wsj, q);
        }
      }
    }
  }

  void dit_stage(u64* a, std::size_t h, std::size_t span, std::size_t inner = 1) const {
    const u64* w = tables_->itw.data() + h;
    const u64* ws = tables_->itw_shoup.data() + h;
    const u64 q = q_, tq = two_q_;
    for (std::size_t blk = 0; blk < span; blk += 2 * h) {
      for (std::size_t j = 0; j < h; ++j) {
        u64* x = a + (blk + j) * inner;
        u64* y = x + h * inner;
        const u64 wj = w[j], wsj = ws[j];
        for (std::size_t i = 0; i < inner; ++i) {
          const u64 u = x[i];
          const u64 t = shoup_mul(y[i], wj, wsj, q);
          const u64 s = u + t;
          const u64 d = u + tq - t;
          x[i] = s >= tq ? s - tq : s;
          y[i] = d >= tq ? d - tq : d;
        }
      }
    }
  }

  // Top stages are done breadth-first until the block fits in cache, then
  // each half is finished depth-first.
  void dif(u64* a, std::size_t len) const {
    if (len <= kBlock) {
      for (std::size_t h = len / 2; h >= 1; h /= 2) dif_stage(a, h, len);
      return;
    }
    dif_stage(a, len / 2, len);
    dif(a, len / 2);
    dif(a + len / 2, len / 2);
  }

  void dit(u64* a, std::size_t len) const {
    if (len <= kBlock) {
      for (std::size_t h = 1; h < len; h *= 2) dit_stage(a, h, len);
      return;
    }
    dit(a, len / 2);
    dit(a + len / 2, len / 2);
    dit_stage(a, len / 2, len);
  }

  u64 q_, two_q_;
  std::shared_ptr<const Pow2Tables> tables_;
};

class SmoothKernel final : public DimKernel {
 public:
  SmoothKernel(const NttPlan& plan, const Montgomery& mont, std::size_t length)
      : DimKernel(length),
        mont_(mont),
        dft_(MontgomeryField{mont}, length, plan.root_of_order(length)) {
    if (length <= kDirect) {
      const u64 q = plan.q;
      const u64 w = plan.root_of_order(length);
      const u64 wi = arith::inv_mod(w, q);
      const u64 inv_len = arith::inv_mod(length % q, q);
      fwd_.resize(length);
      inv_.resize(length);
      u64 x = 1, y = inv_len;
      for (std::size_t k = 0; k < length; ++k) {
        fwd_[k] = mont.to_mont(x);
        inv_[k] = mont.to_mont(y);
        x = arith::mul_mod(x, w, q);
        y = arith::mul_mod(y, wi, q);
      }
    }
  }

  void forward(u64* a, bool) override { dft_.forward({a, len_}); }
  void inverse(u64* a, bool) override { dft_.inverse({a, len_}); }

  void forward_batch(u64* a, std::size_t inner, bool natural) override {
    if (len_ > kDirect) return DimKernel::forward_batch(a, inner, natural);
    direct(a, inner, fwd_);
  }
  void inverse_batch(u64* a, std::size_t inner, bool natural) override {
    if (len_ > kDirect) return DimKernel::inverse_batch(a, inner, natural);
    direct(a, inner, inv_);
  }

 private:
  static constexpr std::size_t kDirect = 16;

  // Quadratic DFT over whole lines; pow[k] = c w^k in Montgomery form.
  void direct(u64* a, std::size_t inner, const std::vector<u64>& pow) {
    const u64 q = mont_.modulus();
    scratch_.assign(len_ * inner, 0);
    for (std::size_t k = 0; k < len_; ++k) {
      u64* out = scratch_.data() + k * inner;
      for (std::size_t j = 0; j < len_; ++j) {
        const u64 w = pow[j * k % len_];
        const u64* in = a + j * inner;
        for (std::size_t i = 0; i < inner; ++i) {
          const u64 s = out[i] + mont_.normalize(mont_.mul(in[i], w));
          out[i] = s >= q ? s - q : s;
        }
      }
    }
    std::copy(scratch_.begin(), scratch_.end(), a);
  }

  Montgomery mont_;
  MixedRadixDft<MontgomeryField> dft_;
  std::vector<u64> fwd_, inv_, scratch_;
};

}  // namespace
}  // namespace detail

Transformer::Transformer(const NttPlan& plan, ConvShape shape)
    : plan_(plan), shape_(std::move(shape)), mont_(plan.q) {
  if (shape_.dims.empty()) throw ShapeMismatch("Transformer: shape has no dimensions");
  for (const auto& dim : shape_.dims) {
    const std::size_t len = dim.length;
    if (len == 0) throw ShapeMismatch("Transformer: zero-length dimension");
    const bool pow2 = std::has_single_bit(len);
    if (dim.kind == DimKind::zero_padded && !pow2) {
      throw ShapeMismatch("Transformer: zero-padded dimension of length " + std::to_string(len) +
                          " is not a power of two");
    }
    if (plan_.root_order() % len != 0) {
      throw ShapeMismatch("Transformer: plan has no root of order " + std::to_string(len));
    }
    if (pow2) {
      kernels_.push_back(std::make_unique<detail::Pow2Kernel>(plan_, len));
    } else {
      if (smooth_radices(len).empty()) {
        throw ShapeMismatch("Transformer: cyclic length " + std::to_string(len) +
                            " is not 7-smooth");
      }
      kernels_.push_back(std::make_unique<detail::SmoothKernel>(plan_, mont_, len));
    }
  }
}

Transformer::~Transformer() = default;
Transformer::Transformer(Transformer&&) noexcept = default;
Transformer& Transformer::operator=(Transformer&&) noexcept = default;

void Transformer::forward(std::span<u64> data, bool natural_order) {
  apply(data, false, natural_order);
}

void Transformer::inverse(std::span<u64> data, bool natural_order) {
  apply(data, true, natural_order);
}

void Transformer::apply(std::span<u64> data, bool inverse, bool natural_order) {
  if (data.size() != shape_.size()) {
    throw ShapeMismatch("Transformer: data length " + std::to_string(data.size()) +
                        " does not match shape size " + std::to_string(shape_.size()));
  }
  const std::size_t ndims = shape_.dims.size();
  std::size_t outer = 1;
  for (std::size_t d = 0; d < ndims; ++d) {
    const std::size_t len = shape_.dims[d].length;
    std::size_t inner = 1;
    for (std::size_t e = d + 1; e < ndims; ++e) inner *= shape_.dims[e].length;
    auto& kernel = *kernels_[d];
    if (len > 1) {
      for (std::size_t o = 0; o < outer; ++o) {
        u64* block = data.data() + o * len * inner;
        if (inner == 1) {
          inverse ? kernel.inverse(block, natural_order) : kernel.forward(block, natural_order);
        } else {
          inverse ? kernel.inverse_batch(block, inner, natural_order)
                  : kernel.forward_batch(block, inner, natural_order);
        }
      }
    }
    outer *= len;
  }
}

void Transformer::to_pointwise_operand(std::span<u64> b) const {
  for (auto& x : b) x = mont_.to_mont(x);
}

void Transformer::pointwise(std::span<u64> a, std::span<const u64> b) const {
  if (a.size() != b.size()) throw ShapeMismatch("pointwise: operand sizes differ");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = mont_.normalize(mont_.mul(a[i], b[i]));
}

std::vector<u64> transform(const NttPlan& plan, std::span<const u64> data, const ConvShape& shape,
                           Direction direction) {
  Transformer t(plan, shape);
  std::vector<u64> out(data.begin(), data.end());
  for (auto& x : out) x %= plan.q;
  if (direction == Direction::forward) {
    t.forward(out);
  } else {
    t.inverse(out);
  }
  return out;
}

std::vector<u64> convolve_multidim(const NttPlan& plan, std::span<const u64> a,
                                   std::span<const u64> b, const ConvShape& shape) {
  if (a.size() != shape.size() || b.size() != shape.size()) {
    throw ShapeMismatch("convolve_multidim: operands do not conform to shape");
  }
  Transformer t(plan, shape);
  std::vector<u64> fa(a.begin(), a.end()), fb(b.begin(), b.end());
  for (auto& x : fa) x %= plan.q;
  for (auto& x : fb) x %= plan.q;
  t.forward(fa, false);
  t.forward(fb, false);
  t.to_pointwise_operand(fb);
  t.pointwise(fa, fb);
  t.inverse(fa, false);
  return fa;
}

i128 crt_pair(u64 r1, u64 q1, u64 r2, u64 q2) {
  const u64 inv = arith::inv_mod(q1 % q2, q2);
  const u64 diff = (r2 % q2 + q2 - r1 % q2) % q2;
  const u64 k = arith::mul_mod(diff, inv, q2);
  const u128 modulus = static_cast<u128>(q1) * q2;
  const u128 x = static_cast<u128>(k) * q1 + r1;
  return x > modulus / 2 ? static_cast<i128>(x) - static_cast<i128>(modulus) : static_cast<i128>(x);
}

i128 crt_pair(u64 r1, u64 r2) { return crt_pair(r1, umbrella_prime(0).q, r2, umbrella_prime(1).q); }

std::vector<NttPlan> plans_for_bound(i128 bound) {
  const NttPlan& p1 = umbrella_prime(0);
  const NttPlan& p2 = umbrella_prime(1);
  if (bound < 0) throw std::invalid_argument("plans_for_bound: negative bound");
  if (2 * bound < static_cast<i128>(p1.q)) return {p1};
  if (bound < static_cast<i128>(static_cast<u128>(p1.q) * p2.q / 2)) return {p1, p2};
  throw BoundOverflow("plans_for_bound: coefficients exceed what two 62-bit primes recover");
}

namespace {

u64 residue_of(i128 x, u64 q) {
  if (x >= 0 && x < static_cast<i128>(q)) return static_cast<u64>(x);
  if (x < 0 && -x < static_cast<i128>(q)) return static_cast<u64>(x + static_cast<i128>(q));
  i128 r = x % static_cast<i128>(q);
  return static_cast<u64>(r < 0 ? r + q : r);
}

i64 lift(u64 r, u64 q) { return r > q / 2 ? -static_cast<i64>(q - r) : static_cast<i64>(r); }

}  // namespace

ExactConvolver::ExactConvolver(std::vector<NttPlan> plans, ConvShape shape,
                               std::span<const i64> fixed)
    : shape_(std::move(shape)) {
  if (plans.empty() || plans.size() > 2) {
    throw std::invalid_argument("ExactConvolver: one or two primes required");
  }
  const std::size_t total = shape_.size();
  if (fixed.size() > total) throw ShapeMismatch("ExactConvolver: fixed operand exceeds shape");
  for (const auto& plan : plans) {
    transformers_.emplace_back(plan, shape_);
    std::vector<u64> hat(total, 0);
    for (std::size_t i = 0; i < fixed.size(); ++i) hat[i] = residue_of(fixed[i], plan.q);
    transformers_.back().forward(hat, false);
    transformers_.back().to_pointwise_operand(hat);
    fixed_hat_.push_back(std::move(hat));
    work_.emplace_back(total);
    ++transforms_;
  }
  if (plans.size() == 2) q1_inv_q2_ = arith::inv_mod(plans[0].q % plans[1].q, plans[1].q);
}

void ExactConvolver::residues(std::span<const i64> input) {
  if (input.size() > shape_.size()) throw ShapeMismatch("ExactConvolver: input exceeds shape");
  for (std::size_t k = 0; k < transformers_.size(); ++k) {
    auto& t = transformers_[k];
    auto& w = work_[k];
    const u64 q = t.plan().q;
    for (std::size_t i = 0; i < input.size(); ++i) {
      const i64 x = input[i];
      const u64 ux = static_cast<u64>(x);
      if (x >= 0) {
        w[i] = ux < q ? ux : ux % q;
      } else {
        const u64 mag = static_cast<u64>(-x);
        w[i] = mag <= q ? q - mag : q - mag % q;
        if (w[i] == q) w[i] = 0;
      }
    }
    std::fill(w.begin() + static_cast<std::ptrdiff_t>(input.size()), w.end(), 0);
    t.forward(w, false);
    t.pointwise(w, fixed_hat_[k]);
    t.inverse(w, false);
    transforms_ += 2;
  }
}

std::vector<i128> ExactConvolver::multiply(std::span<const i64> input) {
  residues(input);
  std::vector<i128> out(shape_.size());
  const u64 q1 = transformers_[0].plan().q;
  if (transformers_.size() == 1) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = lift(work_[0][i], q1);
  } else {
    const u64 q2 = transformers_[1].plan().q;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = crt_pair(work_[0][i], q1, work_[1][i], q2);
  }
  return out;
}

void ExactConvolver::multiply_mod(std::span<const i64> input, const arith::Barrett& p,
                                  std::span<u64> out) {
  residues(input);
  if (out.size() != shape_.size()) throw ShapeMismatch("ExactConvolver: output size mismatch");
  const u64 q1 = transformers_[0].plan().q;
  const u64 pm = p.modulus();
  if (transformers_.size() == 1) {
    const u64 half = q1 / 2;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const u64 r = work_[0][i];
      if (r > half) {
        const u64 neg = p.reduce(q1 - r);
        out[i] = neg == 0 ? 0 : pm - neg;
      } else {
        out[i] = p.reduce(r);
      }
    }
    return;
  }
  const u64 q2 = transformers_[1].plan().q;
  const u128 modulus = static_cast<u128>(q1) * q2;
  const u64 inv = static_cast<u64>(q1_inv_q2_);
  const u64 q1_mod_p = q1 % pm;
  const u64 modulus_mod_p = static_cast<u64>(modulus % pm);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const u64 r1 = work_[0][i], r2 = work_[1][i];
    const u64 k = arith::mul_mod((r2 + q2 - r1 % q2) % q2, inv, q2);
    // x = k q1 + r1 in [0, q1 q2); reduce mod p without 128-bit division.
    u64 x = (arith::mul_mod(k % pm, q1_mod_p, pm) + r1 % pm) % pm;
    const u128 full = static_cast<u128>(k) * q1 + r1;
    if (full > modulus / 2) x = (x + pm - modulus_mod_p) % pm;
    out[i] = x;
  }
}

SignedCoeffs poly_mul_integer(const SignedCoeffs& a, const SignedCoeffs& b, i128 out_bound) {
  if (a.coefficients.empty() || b.coefficients.empty()) {
    throw std::invalid_argument("poly_mul_integer: empty operand");
  }
  for (const auto* op : {&a, &b}) {
    for (i128 c : op->coefficients) {
      if (c > op->bound || -c > op->bound) {
        throw std::invalid_argument("poly_mul_integer: coefficient exceeds declared bound");
      }
    }
  }
  const std::size_t shortest = std::min(a.coefficients.size(), b.coefficients.size());
  // Check shortest * bound(a) * bound(b) <= out_bound without overflowing.
  if (a.bound > 0 && b.bound > 0) {
    const i128 per_term = out_bound / static_cast<i128>(shortest);
    if (a.bound > per_term || b.bound > per_term / a.bound) {
      throw BoundOverflow("poly_mul_integer: declared output bound is too small for the inputs");
    }
  }
  const auto plans = plans_for_bound(out_bound);
  const std::size_t out_len = a.coefficients.size() + b.coefficients.size() - 1;
  const std::size_t padded = next_pow2(out_len);
  const ConvShape shape{{{padded, DimKind::zero_padded}}};

  std::vector<std::vector<u64>> res;
  for (const auto& plan : plans) {
    Transformer t(plan, shape);
    std::vector<u64> fa(padded, 0), fb(padded, 0);
    for (std::size_t i = 0; i < a.coefficients.size(); ++i) fa[i] = residue_of(a.coefficients[i], plan.q);
    for (std::size_t i = 0; i < b.coefficients.size(); ++i) fb[i] = residue_of(b.coefficients[i], plan.q);
    t.forward(fa, false);
    t.forward(fb, false);
    t.to_pointwise_operand(fb);
    t.pointwise(fa, fb);
    t.inverse(fa, false);
    res.push_back(std::move(fa));
  }
  SignedCoeffs out;
  out.bound = out_bound;
  out.coefficients.resize(out_len);
  for (std::size_t i = 0; i < out_len; ++i) {
    out.coefficients[i] = plans.size() == 1 ? static_cast<i128>(lift(res[0][i], plans[0].q))
                                            : crt_pair(res[0][i], plans[0].q, res[1][i], plans[1].q);
  }
  return out;
}

}  // namespace irreg::ntt
