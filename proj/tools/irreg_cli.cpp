#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "irreg/checks.hpp"
#include "irreg/pipeline.hpp"
#include "irreg/scan.hpp"
#include "irreg/stats.hpp"

using namespace irreg;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

u64 require_prime(u64 p) {
  if (p < 5 || p >= (u64{1} << 31) || !arith::is_prime(p)) {
    throw UsageError("P must be a prime with 5 <= P < 2^31");
  }
  return p;
}

u64 require_index(u64 p, u64 r) {
  if (r % 2 != 0 || r < 2 || r + 3 > p) throw UsageError("R must be even with 2 <= R <= P-3");
  return r;
}

std::string join(const std::vector<u32>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
  return s;
}

int cmd_scan(const scan::ScanConfig& config) {
  const auto s = scan::run_scan(config);
  std::cout << "primes=" << s.primes << " irregular=" << s.irregular
            << " checksum_fail=" << s.checksum_fail << '\n';
  std::cout << "strategy rader1=" << s.per_strategy[0] << " rader2=" << s.per_strategy[1]
            << " umbrella=" << s.per_strategy[2] << '\n';
  std::cout << "index-histogram";
  for (std::size_t m = 0; m < s.histogram.size(); ++m) std::cout << ' ' << m << '=' << s.histogram[m];
  std::cout << '\n';
  if (s.resumed_after) std::cout << "resumed after p=" << s.resumed_after << '\n';
  return s.checksum_fail ? kFailed : kOk;
}

int cmd_verify(const std::string& results, const std::string& aux) {
  const auto rep = scan::verify_files(results, aux);
  for (const auto& f : rep.failures) std::cout << "FAIL " << f << '\n';
  std::cout << "checked=" << rep.primes_checked << " failures=" << rep.failures.size() << '\n';
  return rep.failures.empty() ? kOk : kFailed;
}

int cmd_single(u64 p) {
  const auto rec = pipeline::compute_irregular(require_prime(p));
  std::cout << "p=" << p << ' '
            << (rec.irregular.empty() ? std::string("regular") : "irregular=" + join(rec.irregular))
            << " strategy=" << pipeline::to_string(rec.strategy)
            << " checksum=" << (rec.checksum_ok ? "ok" : "FAILED") << '\n';
  return rec.checksum_ok ? kOk : kFailed;
}

int cmd_pair(u64 p, u64 r) {
  require_prime(p);
  require_index(p, r);
  std::cout << "p=" << p << " r=" << r << " residue=" << checks::bernoulli_single(p, r) << '\n';
  return kOk;
}

int cmd_iwasawa(u64 p, u64 r) {
  require_prime(p);
  require_index(p, r);
  checks::IwasawaReport rep;
  try {
    rep = checks::iwasawa_check(p, r);
  } catch (const checks::NotIrregular& e) {
    std::cout << "p=" << p << " r=" << r << " not-irregular\n";
    return kFailed;
  }
  std::cout << "p=" << p << " r=" << r << " s=" << rep.s << " t=" << rep.t << " cond1=" << rep.cond1
            << " cond2=" << rep.cond2 << " cond3=" << rep.cond3 << " cond4=" << rep.cond4;
  if (rep.verdict == checks::Verdict::Confirmed) {
    std::cout << " verdict=confirmed\n";
  } else {
    std::cout << " verdict=inconclusive failed=";
    const bool c[] = {rep.cond1, rep.cond2, rep.cond3, rep.cond4};
    bool first = true;
    for (int i = 0; i < 4; ++i) {
      if (c[i]) continue;
      std::cout << (first ? "" : ",") << "cond" << i + 1;
      first = false;
    }
    std::cout << '\n';
  }
  return kOk;
}

void print_report(const stats::StatsReport& rep) {
  std::printf("range [%llu, %llu]  N=%llu\n", static_cast<unsigned long long>(rep.from),
              static_cast<unsigned long long>(rep.to), static_cast<unsigned long long>(rep.n));
  std::printf("%3s %12s %12s %12s\n", "m", "N_m", "N_m/N", "P_m");
  for (std::size_t m = 0; m < rep.counts.size(); ++m) {
    std::printf("%3zu %12llu %12.6g %12.6g\n", m, static_cast<unsigned long long>(rep.counts[m]),
                static_cast<double>(rep.counts[m]) / static_cast<double>(rep.n),
                stats::poisson_mass(static_cast<unsigned>(m)));
  }
  std::printf("X=%.3f dof=%u p-value=%.4f\n", rep.chi.x, rep.chi.dof, rep.p_value);
}

int cmd_stats(const std::string& path, unsigned cap, u64 width) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  const auto file = stats::parse_results(in);
  print_report(stats::build_report(file, cap));
  if (width) {
    std::printf("\n%12s %12s %10s %8s %8s\n", "from", "to", "N", "X", "p-value");
    for (const auto& rep : stats::interval_reports(file, width)) {
      std::printf("%12llu %12llu %10llu %8.3f %8.3f\n", static_cast<unsigned long long>(rep.from),
                  static_cast<unsigned long long>(rep.to), static_cast<unsigned long long>(rep.n),
                  rep.chi.x, rep.p_value);
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Irregular primes: Bernoulli numbers modulo p"};
  app.require_subcommand(1);

  scan::ScanConfig config;
  std::string force;
  auto* scan_cmd = app.add_subcommand("scan", "Compute irregular indices for every prime in a range");
  scan_cmd->add_option("--from", config.from, "First candidate")->required();
  scan_cmd->add_option("--to", config.to, "Last candidate")->required();
  scan_cmd->add_option("--jobs", config.jobs, "Worker threads")->check(CLI::PositiveNumber);
  scan_cmd->add_option("--out", config.out, "Results file");
  scan_cmd->add_option("--aux", config.aux, "Ten-pair file");
  scan_cmd->add_option("--force-strategy", force, "rader1, rader2 or umbrella")
      ->check(CLI::IsMember({"rader1", "rader2", "umbrella"}));

  std::string results, aux;
  auto* verify_cmd = app.add_subcommand("verify", "Re-check stored ten-pair records");
  verify_cmd->add_option("--results", results)->required();
  verify_cmd->add_option("--aux", aux)->required();

  u64 p = 0, r = 0;
  auto* single_cmd = app.add_subcommand("single", "Irregular indices of one prime");
  single_cmd->add_option("P", p)->required();
  auto* pair_cmd = app.add_subcommand("pair", "B_R mod P by the O(P) method");
  pair_cmd->add_option("P", p)->required();
  pair_cmd->add_option("R", r)->required();
  auto* iwasawa_cmd = app.add_subcommand("iwasawa", "Iwasawa criterion for an irregular pair");
  iwasawa_cmd->add_option("P", p)->required();
  iwasawa_cmd->add_option("R", r)->required();

  unsigned cap = 7;
  u64 width = 0;
  auto* stats_cmd = app.add_subcommand("stats", "Poisson fit of a results file");
  stats_cmd->add_option("--results", results)->required();
  stats_cmd->add_option("--bucket-cap", cap)->check(CLI::Range(1u, 60u));
  stats_cmd->add_option("--interval-width", width, "Also report per interval of this width");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*scan_cmd) {
      if (config.from > config.to || config.to >= (u64{1} << 31)) {
        throw UsageError("need FROM <= TO < 2^31");
      }
      if (!force.empty()) config.force = pipeline::parse_strategy(force);
      return cmd_scan(config);
    }
    if (*verify_cmd) return cmd_verify(results, aux);
    if (*single_cmd) return cmd_single(p);
    if (*pair_cmd) return cmd_pair(p, r);
    if (*iwasawa_cmd) return cmd_iwasawa(p, r);
    if (*stats_cmd) return cmd_stats(results, cap, width);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const stats::MalformedFile& e) {
    std::cerr << "malformed results file: " << e.what() << '\n';
    return kFailed;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kUsage;
}
