#include "detrm/scenario/bench.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>

#include "detrm/contracts/supply_chain.hpp"

namespace detrm::scenario {

using Clock = std::chrono::steady_clock;
using ledger::Transaction;

namespace {

constexpr const char* kAuthority = "inspector";
constexpr const char* kFarm = "farm";
constexpr const char* kDepot = "depot";
constexpr const char* kFarmStore = "farm/cold-1";
constexpr const char* kDepotStore = "depot/cold-1";
constexpr const char* kCommodity = "milk";

std::string lot_id(std::size_t chain, std::size_t step) {
  return "lot-" + std::to_string(chain) + "-" + std::to_string(step);
}

void must_accept(ledger::Ledger& ledger, Transaction tx) {
  const auto r = ledger.submit(std::move(tx));
  if (!r.accepted()) throw Error(Errc::FixtureMissing, "bench setup rejected: " + r.message);
}

struct Pending {
  Transaction tx;
  Clock::time_point enqueued;
};

// Batch cutter: the timer starts when a transaction lands in an empty
// batch; a batch is released on timeout or when it reaches max_batch.
class OrderingQueue {
 public:
  OrderingQueue(std::chrono::milliseconds timeout, std::size_t max_batch) : timeout_(timeout), max_(max_batch) {}

  void push(Transaction tx) {
    std::lock_guard lock(mutex_);
    const auto now = Clock::now();
    if (queue_.empty()) opened_ = now;
    queue_.push_back({std::move(tx), now});
    cv_.notify_one();
  }

  void close() {
    std::lock_guard lock(mutex_);
    closed_ = true;
    cv_.notify_one();
  }

  // Empty result means closed and drained.
  std::vector<Pending> next_batch() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return closed_ || !queue_.empty(); });
    if (queue_.empty()) return {};
    cv_.wait_until(lock, opened_ + timeout_, [&] { return closed_ || queue_.size() >= max_; });
    const std::size_t n = std::min(queue_.size(), max_);
    std::vector<Pending> batch;
    batch.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      batch.push_back(std::move(queue_.front()));
      queue_.pop_front();
    }
    if (!queue_.empty()) opened_ = queue_.front().enqueued;
    return batch;
  }

 private:
  std::chrono::milliseconds timeout_;
  std::size_t max_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<Pending> queue_;
  Clock::time_point opened_{};
  bool closed_ = false;
};

std::vector<Transaction> make_workload(BenchFixture& f, ledger::TxKind kind, std::size_t count) {
  if (!f.ledger || !f.keys) throw Error(Errc::FixtureMissing, "fixture has no ledger");
  const auto& st = contracts::supply_chain(*f.ledger).state();
  for (const char* id : {kAuthority, kFarm, kDepot}) {
    if (!st.participant(id)) throw Error(Errc::FixtureMissing, std::string("bench member ") + id + " is absent");
  }
  if (f.steps.size() != f.chains || f.chains == 0) throw Error(Errc::FixtureMissing, "fixture has no lot chains");
  for (std::size_t k = 0; k < f.chains; ++k) {
    const auto* lot = st.asset(lot_id(k, f.steps[k]));
    if (!lot || !lot->live()) throw Error(Errc::FixtureMissing, "lot chain " + std::to_string(k) + " is broken");
    if (kind == ledger::TxKind::produce && lot->owner != kFarm) {
      throw Error(Errc::FixtureMissing, "produce load needs every chain head at the farm");
    }
  }

  std::vector<Transaction> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t k = i % f.chains;
    const std::size_t s = f.steps[k]++;
    const std::string src = lot_id(k, s);
    const std::string dst = lot_id(k, s + 1);
    if (kind == ledger::TxKind::trade) {
      const bool outbound = s % 2 == 0;
      const std::string seller = outbound ? kFarm : kDepot;
      const std::string buyer = outbound ? kDepot : kFarm;
      ledger::TradePayload p;
      p.asset_batch_id = src;
      p.seller = seller;
      p.buyer = buyer;
      p.new_batch_id = dst;
      p.destination_location = outbound ? kDepotStore : kFarmStore;
      p.terms.push_back({"delivery", "delivered cold", 1.0, 1, 1});
      out.push_back(f.keys->sign({"trade/" + dst, 1, std::move(p), {}}, {seller, buyer}));
    } else {
      ledger::ProducePayload p;
      p.producer = kFarm;
      p.sources = {src};
      p.outputs.push_back({dst, kCommodity, kFarmStore, 1.0, {}});
      out.push_back(f.keys->sign({dst, 1, std::move(p), {}}, {kFarm}));
    }
  }
  return out;
}

double percentile(std::vector<double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

}  // namespace

BenchFixture make_bench_fixture(std::size_t chains, std::uint64_t seed) {
  BenchFixture f;
  f.ledger = std::make_unique<ledger::Ledger>(contracts::supply_chain_factory());
  f.keys = std::make_unique<Keyring>(seed);
  f.chains = chains;
  auto& keys = *f.keys;
  auto& l = *f.ledger;

  ledger::GenesisPayload g;
  g.authorities.push_back({kAuthority, {}, keys.key(kAuthority).public_key()});
  must_accept(l, keys.sign({"genesis", 0, g, {}}, {kAuthority}));
  must_accept(l, keys.sign({"join/farm", 0,
                            ledger::JoinPayload{kFarm, {ledger::Role::producer}, false, {}, {kFarmStore},
                                                keys.key(kFarm).public_key()},
                            {}},
                           {kAuthority}));
  must_accept(l, keys.sign({"join/depot", 0,
                            ledger::JoinPayload{kDepot, {ledger::Role::distributor}, false, {}, {kDepotStore},
                                                keys.key(kDepot).public_key()},
                            {}},
                           {kAuthority}));
  must_accept(l, keys.sign({"contract/milk", 0, ledger::DeployPayload{kCommodity, 2.0, 8.0, 1, {}, kAuthority, kFarm}, {}},
                           {kAuthority, kFarm}));
  for (std::size_t k = 0; k < chains; ++k) {
    must_accept(l, keys.sign({lot_id(k, 0), 0, ledger::CreatePayload{kFarm, kCommodity, kFarmStore, 1.0, {}}, {}},
                             {kFarm}));
  }
  l.seal_block();
  f.steps.assign(chains, 0);
  return f;
}

BenchRow bench_rate(BenchFixture& fixture, ledger::TxKind kind, unsigned rate, std::chrono::milliseconds duration,
                    std::chrono::milliseconds batch_timeout, std::size_t max_batch) {
  if (kind != ledger::TxKind::trade && kind != ledger::TxKind::produce) {
    throw Error(Errc::ConfigError, "bench supports trade and produce transactions");
  }
  BenchRow row;
  row.rate = rate;
  const auto count = static_cast<std::size_t>(static_cast<double>(rate) * std::chrono::duration<double>(duration).count());
  auto workload = make_workload(fixture, kind, count);
  if (count == 0) return row;

  OrderingQueue queue(batch_timeout, std::max<std::size_t>(max_batch, 1));
  std::vector<double> latencies;
  latencies.reserve(count);
  Clock::time_point last_commit{};
  auto& ledger = *fixture.ledger;

  std::thread committer([&] {
    while (true) {
      auto batch = queue.next_batch();
      if (batch.empty()) break;
      for (auto& p : batch) {
        if (!ledger.submit(std::move(p.tx)).accepted()) ++row.rejected;
      }
      ledger.seal_block();
      ++row.blocks;
      last_commit = Clock::now();
      for (const auto& p : batch) {
        latencies.push_back(std::chrono::duration<double, std::milli>(last_commit - p.enqueued).count());
      }
    }
  });

  const auto start = Clock::now();
  const auto interval = std::chrono::duration<double>(1.0 / rate);
  for (std::size_t i = 0; i < count; ++i) {
    std::this_thread::sleep_until(start + std::chrono::duration_cast<Clock::duration>(interval * static_cast<double>(i)));
    queue.push(std::move(workload[i]));
    ++row.submitted;
  }
  queue.close();
  committer.join();

  row.committed = row.submitted - row.rejected;
  row.elapsed_s = std::chrono::duration<double>(last_commit - start).count();
  row.throughput = row.elapsed_s > 0.0 ? static_cast<double>(row.committed) / row.elapsed_s : 0.0;
  std::sort(latencies.begin(), latencies.end());
  row.p50_ms = percentile(latencies, 0.50);
  row.p95_ms = percentile(latencies, 0.95);
  row.p99_ms = percentile(latencies, 0.99);
  return row;
}

std::vector<BenchRow> run_bench(const BenchOptions& options) {
  std::vector<BenchRow> rows;
  for (unsigned rate : options.rates) {
    auto fixture = make_bench_fixture(options.chains, options.seed);
    rows.push_back(bench_rate(fixture, options.kind, rate, options.duration, options.batch_timeout, options.max_batch));
  }
  return rows;
}

nlohmann::json to_json(const std::vector<BenchRow>& rows) {
  auto out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"rate", r.rate},
                   {"submitted", r.submitted},
                   {"committed", r.committed},
                   {"rejected", r.rejected},
                   {"blocks", r.blocks},
                   {"elapsed_s", r.elapsed_s},
                   {"throughput_tps", r.throughput},
                   {"latency_ms", {{"p50", r.p50_ms}, {"p95", r.p95_ms}, {"p99", r.p99_ms}}}});
  }
  return out;
}

}  // namespace detrm::scenario
