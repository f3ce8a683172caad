#pragma once

// Independent verification: the O(p) single-index Bernoulli residue, the
// Iwasawa-invariant criterion for irregular pairs, and audits of stored
// ten-pair records.

#include <stdexcept>

#include "irreg/arith.hpp"
#include "irreg/pipeline.hpp"

namespace irreg::checks {

struct BadIndex : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NotIrregular : std::domain_error {
  using std::domain_error::domain_error;
};

struct SumNotDivisible : std::logic_error {
  using std::logic_error::logic_error;
};

/// B_r mod p for even 2 <= r <= p-3 in O(p) word operations.
u64 bernoulli_single(u64 p, u64 r);

enum class Verdict { Confirmed, Inconclusive };

struct IwasawaReport {
  u64 p = 0;
  u64 r = 0;
  u64 s = 0;  // s_{p,r} mod p
  u64 t = 0;  // t_{p,r} mod p
  bool cond1 = false, cond2 = false, cond3 = false, cond4 = false;
  Verdict verdict = Verdict::Inconclusive;
};

/// Requires p < 2^31 and (p, r) irregular.
IwasawaReport iwasawa_check(u64 p, u64 r);

/// Recomputes each stored pair and checks the stored ordering.
bool audit_record(const pipeline::IrregularRecord& record);

}  // namespace irreg::checks
