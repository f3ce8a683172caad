#include "irreg/stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <sstream>
#include <string>

namespace irreg::stats {

double poisson_mass(unsigned m) {
  return std::exp(-0.5 - m * std::log(2.0) - std::lgamma(m + 1.0));
}

ChiSquare chi_square_stat(const std::vector<u64>& counts, unsigned bucket_cap) {
  if (bucket_cap == 0) throw std::invalid_argument("chi_square_stat: bucket cap must be >= 1");
  u64 total = 0;
  for (u64 c : counts) total += c;
  if (total == 0) throw EmptyInput("chi_square_stat: no observations");
  const double n = static_cast<double>(total);

  ChiSquare out;
  out.dof = bucket_cap;
  out.observed.assign(bucket_cap + 1, 0);
  out.expected.assign(bucket_cap + 1, 0);
  for (std::size_t m = 0; m < counts.size(); ++m) {
    out.observed[std::min<std::size_t>(m, bucket_cap)] += static_cast<double>(counts[m]);
  }
  double assigned = 0;
  for (unsigned m = 0; m < bucket_cap; ++m) {
    out.expected[m] = poisson_mass(m) * n;
    assigned += out.expected[m];
  }
  out.expected[bucket_cap] = n - assigned;
  for (unsigned m = 0; m <= bucket_cap; ++m) {
    const double d = out.observed[m] - out.expected[m];
    out.x += d * d / out.expected[m];
  }
  return out;
}

double chi_square_sf(double x, unsigned dof) {
  if (dof == 0) throw std::invalid_argument("chi_square_sf: dof must be positive");
  if (x <= 0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, x / 2.0);
}

namespace {

[[noreturn]] void malformed(std::size_t line, const std::string& why) {
  throw MalformedFile("line " + std::to_string(line) + ": " + why);
}

u64 parse_u64(const std::string& s, std::size_t line) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    malformed(line, "expected an unsigned integer, got '" + s + "'");
  }
  return std::stoull(s);
}

// Reads "key=value" from a token, checking the key.
u64 field(const std::string& token, const std::string& key, std::size_t line) {
  if (token.rfind(key + "=", 0) != 0) malformed(line, "expected " + key + "=<value>");
  return parse_u64(token.substr(key.size() + 1), line);
}

}  // namespace

ResultsFile parse_results(std::istream& in) {
  ResultsFile file;
  std::string text;
  std::size_t line = 0;
  bool header = false, footer = false;
  while (std::getline(in, text)) {
    ++line;
    if (text.empty()) continue;
    if (footer) malformed(line, "content after summary line");
    std::istringstream tokens(text);
    std::string head;
    tokens >> head;
    if (!header) {
      std::string version, from, to;
      tokens >> version >> from >> to;
      if (head != "#irregular-scan" || version != "v1") malformed(line, "missing header");
      file.from = field(from, "from", line);
      file.to = field(to, "to", line);
      header = true;
      continue;
    }
    if (head == "#summary") {
      std::string a, b, c;
      tokens >> a >> b >> c;
      file.primes = field(a, "primes", line);
      file.irregular = field(b, "irregular", line);
      file.checksum_fail = field(c, "checksum_fail", line);
      footer = true;
      continue;
    }
    if (head == "#checksum-fail") {
      std::string p;
      tokens >> p;
      file.checksum_failures.push_back(parse_u64(p, line));
      continue;
    }
    if (head[0] == '#') malformed(line, "unknown directive " + head);
    const auto colon = text.find(':');
    if (colon == std::string::npos) malformed(line, "expected p:r1,r2,...");
    const u64 p = parse_u64(text.substr(0, colon), line);
    std::vector<u32> indices;
    std::istringstream list(text.substr(colon + 1));
    std::string item;
    while (std::getline(list, item, ',')) indices.push_back(static_cast<u32>(parse_u64(item, line)));
    if (indices.empty()) malformed(line, "irregular prime without indices");
    if (!std::is_sorted(indices.begin(), indices.end())) malformed(line, "indices not ascending");
    if (p < file.from || p > file.to) malformed(line, "prime outside the header range");
    if (!file.records.empty() && file.records.back().first >= p) {
      malformed(line, "primes not strictly ascending");
    }
    file.records.emplace_back(p, std::move(indices));
  }
  if (!header) throw MalformedFile("empty results file");
  if (!footer) throw MalformedFile("missing summary line");
  if (file.irregular != file.records.size()) {
    throw MalformedFile("summary irregular count does not match the records");
  }
  return file;
}

u64 count_scanned_primes(u64 from, u64 to) {
  from = std::max<u64>(from, 5);
  u64 total = 0;
  constexpr u64 kChunk = u64{1} << 24;
  for (u64 lo = from; lo <= to; lo += kChunk) {
    total += arith::primes_in_range(lo, std::min(to, lo + kChunk - 1)).size();
  }
  return total;
}

namespace {

StatsReport report_for(const ResultsFile& file, u64 from, u64 to, unsigned cap) {
  StatsReport rep;
  rep.from = from;
  rep.to = to;
  rep.n = count_scanned_primes(from, to);
  u64 irregular = 0;
  for (const auto& [p, idx] : file.records) {
    if (p < from || p > to) continue;
    if (rep.counts.size() <= idx.size()) rep.counts.resize(idx.size() + 1, 0);
    ++rep.counts[idx.size()];
    ++irregular;
  }
  if (irregular > rep.n) throw MalformedFile("more irregular primes than primes in range");
  if (rep.counts.empty()) rep.counts.resize(1, 0);
  rep.counts[0] = rep.n - irregular;
  rep.chi = chi_square_stat(rep.counts, cap);
  rep.p_value = chi_square_sf(rep.chi.x, rep.chi.dof);
  return rep;
}

}  // namespace

StatsReport build_report(const ResultsFile& file, unsigned bucket_cap) {
  if (count_scanned_primes(file.from, file.to) != file.primes) {
    throw MalformedFile("summary prime count does not match the header range");
  }
  return report_for(file, file.from, file.to, bucket_cap);
}

std::vector<StatsReport> interval_reports(const ResultsFile& file, u64 width, unsigned bucket_cap) {
  if (width == 0) throw std::invalid_argument("interval_reports: width must be positive");
  std::vector<StatsReport> out;
  for (u64 j = file.from / width; j <= file.to / width; ++j) {
    const u64 lo = std::max(file.from, j * width);
    const u64 hi = std::min(file.to, (j + 1) * width - 1);
    if (count_scanned_primes(lo, hi) == 0) continue;
    out.push_back(report_for(file, lo, hi, bucket_cap));
  }
  return out;
}

}  // namespace irreg::stats
