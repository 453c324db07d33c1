#pragma once

// Load benchmark: pre-signed trade or produce transactions are offered at
// a fixed rate to an ordering stage that cuts batches on a timeout; the
// committer validates, applies and seals each batch.

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "detrm/ledger/ledger.hpp"
#include "detrm/scenario/runner.hpp"

namespace detrm::scenario {

struct BenchOptions {
  ledger::TxKind kind = ledger::TxKind::trade;
  std::vector<unsigned> rates{100, 500, 1000};
  std::chrono::milliseconds duration{30'000};
  std::chrono::milliseconds batch_timeout{200};
  std::size_t max_batch = 100'000;
  std::size_t chains = 16;  // independent asset lineages
  std::uint64_t seed = 1;
};

struct BenchRow {
  unsigned rate = 0;
  std::size_t submitted = 0;
  std::size_t committed = 0;
  std::size_t rejected = 0;
  std::size_t blocks = 0;
  double elapsed_s = 0.0;
  double throughput = 0.0;  // committed / (last commit - first submit)
  double p50_ms = 0.0;
  double p95_ms = 0.0;
  double p99_ms = 0.0;
};

/// Ledger with the bench members (authority `inspector`, producer
/// `farm`, distributor `depot`) and one starting lot per chain.
struct BenchFixture {
  std::unique_ptr<ledger::Ledger> ledger;
  std::unique_ptr<Keyring> keys;
  std::size_t chains = 0;
  std::vector<std::size_t> steps;  // transfers applied so far, per chain
};

BenchFixture make_bench_fixture(std::size_t chains, std::uint64_t seed);

/// One load level on `fixture`. Throws Error(FixtureMissing) when the
/// fixture members or lots are absent.
BenchRow bench_rate(BenchFixture& fixture, ledger::TxKind kind, unsigned rate, std::chrono::milliseconds duration,
                    std::chrono::milliseconds batch_timeout, std::size_t max_batch = 100'000);

/// A fresh fixture per rate.
std::vector<BenchRow> run_bench(const BenchOptions& options);

nlohmann::json to_json(const std::vector<BenchRow>& rows);

}  // namespace detrm::scenario
