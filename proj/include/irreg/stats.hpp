#pragma once

// Poisson(1/2) model for the index of irregularity: masses, chi-square
// goodness of fit, and reports built from scan result files.

#include <istream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "irreg/arith.hpp"

namespace irreg::stats {

struct MalformedFile : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// e^{-1/2} / (2^m m!).
double poisson_mass(unsigned m);

struct ChiSquare {
  std::vector<double> observed;  // buckets 0..cap, the last one combined
  std::vector<double> expected;
  double x = 0;
  unsigned dof = 0;
};

/// counts[m] = number of primes with index m.
ChiSquare chi_square_stat(const std::vector<u64>& counts, unsigned bucket_cap);

/// Upper tail of the chi-square distribution with dof degrees of freedom.
double chi_square_sf(double x, unsigned dof);

struct ResultsFile {
  u64 from = 0, to = 0;
  std::vector<std::pair<u64, std::vector<u32>>> records;  // irregular primes, ascending
  std::vector<u64> checksum_failures;
  u64 primes = 0, irregular = 0, checksum_fail = 0;  // footer
};

/// Parses the line-oriented scan format; throws MalformedFile.
ResultsFile parse_results(std::istream& in);

struct StatsReport {
  u64 from = 0, to = 0;
  u64 n = 0;
  std::vector<u64> counts;  // counts[m] = primes with i_p = m
  ChiSquare chi;
  double p_value = 1;
};

/// Number of primes p >= 5 in [from, to].
u64 count_scanned_primes(u64 from, u64 to);

StatsReport build_report(const ResultsFile& file, unsigned bucket_cap = 7);

/// Reports over [w j, w (j+1)) intersected with the scanned range.
std::vector<StatsReport> interval_reports(const ResultsFile& file, u64 width,
                                          unsigned bucket_cap = 6);

}  // namespace irreg::stats
