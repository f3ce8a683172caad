#pragma once

// Per-prime computation of B_r mod p for all even 2 <= r <= p-3: layout of
// scaled f_c values, horizontal row DFTs, vertical twisted DFTs, assembly
// and checksum.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "irreg/arith.hpp"
#include "irreg/rader.hpp"

namespace irreg::pipeline {

enum class Strategy { Rader1, Rader2, Umbrella };

std::string to_string(Strategy s);
/// Parses "rader1", "rader2" or "umbrella".
std::optional<Strategy> parse_strategy(const std::string& name);

struct PrimeContext {
  u64 p = 0;
  u64 gamma = 0;
  u64 c = 0;
  u64 alpha_c = 0;
  u64 m = 0;
  u64 n = 0;
  arith::Factorization n_factors;
  u64 omega = 0;  // gamma^{4 m^2}, order n
  u64 theta = 0;  // gamma^{n^2}, order 2m
  u64 xi = 0;     // gamma^{2 m^2}, xi^2 = omega
  Strategy strategy = Strategy::Umbrella;
  std::optional<rader::RaderPlan> plan1;  // for n (Rader1) or n1 (Rader2)
  std::optional<rader::RaderPlan> plan2;  // for n2
  std::optional<rader::DeSplit> split;
};

/// Row-major m x n matrices; a2 holds 2 f_c(gamma^i) for
/// i = 2m i1 + n i2 mod p-1, d the row DFT outputs.
struct Layout {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<i32> a2;
  std::vector<u32> d;

  i32 a(std::size_t i2, std::size_t i1) const { return a2[i2 * cols + i1]; }
};

struct TenPair {
  u32 r;
  u32 residue;

  bool operator==(const TenPair&) const = default;
};

struct ResidueTable {
  u64 p = 0;
  std::vector<u32> b;     // b[j] for odd j < p-1
  std::vector<u32> bern;  // bern[r] for even 2 <= r <= p-3; other slots unused
  std::vector<u32> irregular;
  u64 checksum = 0;
  std::vector<TenPair> ten_pairs;
};

struct IrregularRecord {
  u64 p = 0;
  Strategy strategy = Strategy::Umbrella;
  std::vector<u32> irregular;
  std::vector<TenPair> ten_pairs;
  bool checksum_ok = false;
};

/// 2 f_c(x) = 2 floor(c (x/c mod p) / p) - (c - 1).
i64 f_value(u64 c, u64 p, u64 x);

/// Strategy selection; a forced strategy is honoured when it applies to p,
/// otherwise the umbrella is used.
PrimeContext classify_prime(u64 p, std::optional<Strategy> force = std::nullopt);

Layout build_layout(const PrimeContext& ctx);
void horizontal_dfts(const PrimeContext& ctx, Layout& layout);
std::vector<u32> vertical_dfts(const PrimeContext& ctx, const Layout& layout);

/// B_r for even r = j alpha_c <= p-3, which the congruence with base c
/// cannot determine. Empty when c generates.
std::vector<std::pair<u32, u32>> recover_missing(const PrimeContext& ctx);

ResidueTable assemble(const PrimeContext& ctx, std::vector<u32> b,
                      const std::vector<std::pair<u32, u32>>& missing);

/// sum_{r=0}^{p-3} 2^r (r+1) B_r mod p over a complete table.
u64 checksum(const ResidueTable& table);
bool checksum_verify(const ResidueTable& table);

/// Up to ten (r, B_r) pairs with the smallest residues, ties by r.
std::vector<TenPair> smallest_pairs(const std::vector<u32>& bern, u64 p);

struct Computation {
  PrimeContext ctx;
  ResidueTable table;
};

Computation compute_table(u64 p, std::optional<Strategy> force = std::nullopt);
IrregularRecord compute_irregular(u64 p, std::optional<Strategy> force = std::nullopt);

}  // namespace irreg::pipeline
