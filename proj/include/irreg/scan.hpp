#pragma once

// Range scanning with a worker pool, ordered output, checkpoints in a
// .partial file, and re-verification of stored records.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "irreg/pipeline.hpp"

namespace irreg::scan {

struct ScanConfig {
  u64 from = 5;
  u64 to = 5;
  unsigned jobs = 1;
  std::string out = "scan.txt";
  std::string aux;  // empty: no ten-pair file
  std::optional<pipeline::Strategy> force;
  u64 checkpoint_every = 512;  // primes between checkpoints
};

struct ScanSummary {
  u64 primes = 0;
  u64 irregular = 0;
  u64 checksum_fail = 0;
  std::array<u64, 3> per_strategy{};  // indexed by pipeline::Strategy
  std::vector<u64> histogram;         // histogram[m] = primes with i_p = m
  u64 resumed_after = 0;              // last prime of a recovered checkpoint
};

/// Processes every prime in [max(from, 5), to]. Output is identical for any
/// job count and across interruptions.
ScanSummary run_scan(const ScanConfig& config);

/// Results line for one record, e.g. "157:62,110".
std::string format_record(const pipeline::IrregularRecord& record);

struct VerifyReport {
  u64 primes_checked = 0;
  std::vector<std::string> failures;
};

/// Audits every aux record and checks it against the results file.
VerifyReport verify_files(const std::string& results_path, const std::string& aux_path);

}  // namespace irreg::scan
