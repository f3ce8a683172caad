#include "irreg/scan.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "irreg/checks.hpp"
#include "irreg/stats.hpp"

namespace irreg::scan {

namespace fs = std::filesystem;
using pipeline::IrregularRecord;
using pipeline::Strategy;

std::string format_record(const IrregularRecord& record) {
  std::string line = std::to_string(record.p) + ":";
  for (std::size_t i = 0; i < record.irregular.size(); ++i) {
    if (i) line += ',';
    line += std::to_string(record.irregular[i]);
  }
  return line;
}

namespace {

std::string header_line(u64 from, u64 to) {
  return "#irregular-scan v1 from=" + std::to_string(from) + " to=" + std::to_string(to);
}

struct Checkpoint {
  u64 last = 0;
  ScanSummary summary;
};

std::string checkpoint_line(u64 last, const ScanSummary& s) {
  return "#checkpoint last=" + std::to_string(last) + " primes=" + std::to_string(s.primes) +
         " irregular=" + std::to_string(s.irregular) +
         " checksum_fail=" + std::to_string(s.checksum_fail) +
         " rader1=" + std::to_string(s.per_strategy[0]) +
         " rader2=" + std::to_string(s.per_strategy[1]) +
         " umbrella=" + std::to_string(s.per_strategy[2]);
}

std::map<std::string, u64> parse_fields(const std::string& line) {
  std::map<std::string, u64> out;
  std::istringstream in(line);
  std::string tok;
  in >> tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    out[tok.substr(0, eq)] = std::stoull(tok.substr(eq + 1));
  }
  return out;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::vector<std::string> lines;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::trunc);
  for (const auto& l : lines) out << l << '\n';
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

// Restores state from an interrupted run, truncating both partial files to
// the last checkpoint. Returns nullopt when there is nothing to resume.
std::optional<Checkpoint> recover(const fs::path& results, const fs::path& aux,
                                  const std::string& header) {
  if (!fs::exists(results)) return std::nullopt;
  auto lines = read_lines(results);
  if (lines.empty() || lines.front() != header) return std::nullopt;
  std::optional<std::size_t> last_cp;
  for (std::size_t i = 0; i < lines.size(); ++i)
    if (lines[i].rfind("#checkpoint ", 0) == 0) last_cp = i;
  if (!last_cp) return std::nullopt;

  const auto f = parse_fields(lines[*last_cp]);
  Checkpoint cp;
  cp.last = f.at("last");
  cp.summary.primes = f.at("primes");
  cp.summary.irregular = f.at("irregular");
  cp.summary.checksum_fail = f.at("checksum_fail");
  cp.summary.per_strategy = {f.at("rader1"), f.at("rader2"), f.at("umbrella")};
  lines.resize(*last_cp + 1);
  write_lines(results, lines);

  if (!aux.empty()) {
    std::vector<std::string> kept;
    for (const auto& l : read_lines(aux)) {
      std::istringstream in(l);
      u64 p = 0;
      if (in >> p && p <= cp.last) kept.push_back(l);
    }
    write_lines(aux, kept);
  }
  return cp;
}

IrregularRecord process(u64 p, const std::optional<Strategy>& force) {
  auto rec = pipeline::compute_irregular(p, force);
  if (!rec.checksum_ok && rec.strategy != Strategy::Umbrella) {
    rec = pipeline::compute_irregular(p, Strategy::Umbrella);
  }
  return rec;
}

}  // namespace

ScanSummary run_scan(const ScanConfig& config) {
  if (config.from > config.to || config.to >= (u64{1} << 31)) {
    throw std::invalid_argument("run_scan: need from <= to < 2^31");
  }
  const std::string header = header_line(config.from, config.to);
  const fs::path out_path(config.out);
  const fs::path partial = out_path.string() + ".partial";
  const fs::path aux_partial = config.aux.empty() ? fs::path() : fs::path(config.aux + ".partial");

  ScanSummary summary;
  u64 last_done = 0;
  if (auto cp = recover(partial, aux_partial, header)) {
    summary = cp->summary;
    last_done = cp->last;
    summary.resumed_after = cp->last;
  } else {
    write_lines(partial, {header});
    if (!aux_partial.empty()) write_lines(aux_partial, {});
  }

  auto primes = arith::primes_in_range(std::max<u64>({config.from, 5, last_done + 1}), config.to);

  std::ofstream results(partial, std::ios::app);
  std::ofstream aux;
  if (!aux_partial.empty()) aux.open(aux_partial, std::ios::app);

  std::mutex mu;
  std::condition_variable ready;
  std::map<std::size_t, IrregularRecord> done;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= primes.size()) return;
      IrregularRecord rec;
      try {
        rec = process(primes[i], config.force);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next = primes.size();
        ready.notify_all();
        return;
      }
      std::lock_guard lock(mu);
      done.emplace(i, std::move(rec));
      ready.notify_all();
    }
  };

  const unsigned jobs = std::max(1u, config.jobs);
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);

  u64 since_checkpoint = 0;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    IrregularRecord rec;
    {
      std::unique_lock lock(mu);
      ready.wait(lock, [&] { return done.count(i) || failure; });
      if (failure) break;
      rec = std::move(done.at(i));
      done.erase(i);
    }
    ++summary.primes;
    ++summary.per_strategy[static_cast<std::size_t>(rec.strategy)];
    if (!rec.checksum_ok) {
      ++summary.checksum_fail;
      results << "#checksum-fail " << rec.p << '\n';
    } else {
      if (!rec.irregular.empty()) {
        ++summary.irregular;
        results << format_record(rec) << '\n';
      }
      if (aux.is_open()) {
        for (const auto& pair : rec.ten_pairs) aux << rec.p << ' ' << pair.r << ' ' << pair.residue << '\n';
      }
    }
    if (++since_checkpoint == config.checkpoint_every || i + 1 == primes.size()) {
      since_checkpoint = 0;
      if (aux.is_open()) aux.flush();
      results << checkpoint_line(rec.p, summary) << '\n';
      results.flush();
    }
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  results.close();
  if (aux.is_open()) aux.close();

  // Final files: drop checkpoint lines and append the summary.
  std::vector<std::string> final_lines;
  for (auto& l : read_lines(partial))
    if (l.rfind("#checkpoint ", 0) != 0) final_lines.push_back(std::move(l));
  final_lines.push_back("#summary primes=" + std::to_string(summary.primes) +
                        " irregular=" + std::to_string(summary.irregular) +
                        " checksum_fail=" + std::to_string(summary.checksum_fail));
  write_lines(out_path, final_lines);
  fs::remove(partial);
  if (!aux_partial.empty()) fs::rename(aux_partial, config.aux);

  // The histogram is rebuilt from the file so resumed runs report it fully.
  std::ifstream in(out_path);
  const auto parsed = stats::parse_results(in);
  summary.histogram.assign(1, summary.primes - summary.checksum_fail);
  for (const auto& [p, idx] : parsed.records) {
    if (summary.histogram.size() <= idx.size()) summary.histogram.resize(idx.size() + 1, 0);
    ++summary.histogram[idx.size()];
    --summary.histogram[0];
  }
  return summary;
}

VerifyReport verify_files(const std::string& results_path, const std::string& aux_path) {
  for (const auto& path : {results_path, aux_path}) {
    if (!fs::exists(path)) throw std::invalid_argument("no such file: " + path);
  }
  std::ifstream rin(results_path);
  const auto results = stats::parse_results(rin);
  std::map<u64, std::vector<u32>> irregular(results.records.begin(), results.records.end());

  std::map<u64, IrregularRecord> records;
  std::ifstream ain(aux_path);
  std::string line;
  std::size_t lineno = 0;
  VerifyReport report;
  while (std::getline(ain, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream in(line);
    u64 p, r, residue;
    std::string extra;
    if (!(in >> p >> r >> residue) || (in >> extra)) {
      report.failures.push_back("aux line " + std::to_string(lineno) + ": malformed");
      continue;
    }
    auto& rec = records[p];
    rec.p = p;
    rec.ten_pairs.push_back({static_cast<u32>(r), static_cast<u32>(residue)});
  }

  for (const auto& [p, rec] : records) {
    ++report.primes_checked;
    const std::string where = "p=" + std::to_string(p);
    if (p < 5 || !arith::is_prime(p) || p < results.from || p > results.to) {
      report.failures.push_back(where + ": not a prime of the scanned range");
      continue;
    }
    try {
      if (!checks::audit_record(rec)) {
        std::string detail;
        for (const auto& pair : rec.ten_pairs) {
          if (pair.r >= 2 && pair.r + 3 <= p && pair.r % 2 == 0 &&
              checks::bernoulli_single(p, pair.r) != pair.residue) {
            detail = " r=" + std::to_string(pair.r);
            break;
          }
        }
        report.failures.push_back(where + detail + ": stored pairs do not match recomputation");
        continue;
      }
    } catch (const std::exception& e) {
      report.failures.push_back(where + ": " + e.what());
      continue;
    }
    std::vector<u32> zeros;
    for (const auto& pair : rec.ten_pairs)
      if (pair.residue == 0) zeros.push_back(pair.r);
    const auto it = irregular.find(p);
    const std::vector<u32> listed = it == irregular.end() ? std::vector<u32>{} : it->second;
    if (zeros != listed) report.failures.push_back(where + ": irregular indices disagree with results");
  }
  const u64 expected = results.primes - results.checksum_fail;
  if (records.size() != expected) {
    report.failures.push_back("aux covers " + std::to_string(records.size()) + " primes, expected " +
                              std::to_string(expected));
  }
  return report;
}

}  // namespace irreg::scan
