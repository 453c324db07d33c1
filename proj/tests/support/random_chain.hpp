#pragma once

// Random mixed-kind workload on a populated test network. Every accepted
// transaction is kept, block by block, so tests can replay or filter it.

#include <algorithm>
#include <cmath>
#include <iterator>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "network.hpp"

namespace testnet {

struct Workload {
  std::vector<std::vector<ledger::Transaction>> blocks;  // accepted txs per sealed block
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t queries = 0;
};

inline Workload random_workload(Network& net, std::size_t target_tx, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Workload w;
  std::vector<ledger::Transaction> current;
  std::uint64_t epoch = 1;
  std::size_t lots = 0;

  auto pick = [&](const std::set<std::string>& ids) {
    auto it = ids.begin();
    std::advance(it, static_cast<long>(rng() % ids.size()));
    return *it;
  };
  auto submit = [&](ledger::Transaction tx) {
    auto copy = tx;
    const auto r = net.ledger.submit(std::move(tx));
    if (r.accepted()) {
      ++w.accepted;
      if (copy.kind() == ledger::TxKind::query) ++w.queries;
      current.push_back(std::move(copy));
    } else {
      ++w.rejected;
    }
  };

  while (w.accepted < target_tx) {
    const auto& st = net.state();
    const double roll = unit(rng);
    if (roll < 0.06 || st.live_assets_of("farm").empty()) {
      const std::string batch = "lot-" + std::to_string(lots++);
      ledger::CreatePayload c{"farm", "milk", "farm/cold", 10.0, {{"grade", std::to_string(rng() % 3)}}};
      submit(net.keys.sign({batch, epoch, c, {}}, {"farm"}));
    } else if (roll < 0.45) {
      // Mostly in band; one in ten rounds has a warm reading and alerts.
      std::vector<trm::Observation> rs;
      const std::size_t p = 3 + rng() % 5;
      const bool excursion = unit(rng) < 0.1;
      for (std::size_t j = 0; j < p; ++j) {
        const double v = excursion && j == 0 ? 8.5 + 3.0 * unit(rng) : 3.0 + 4.0 * unit(rng);
        rs.push_back({"farm/cold/s" + std::to_string(j), v, unit(rng), epoch, "farm/cold"});
      }
      ledger::MonitorPayload m{"gw/farm/cold", "farm/cold", std::move(rs)};
      submit(net.keys.sign({"monitor/" + std::to_string(w.accepted) + "/" + std::to_string(epoch), epoch, m, {}},
                           {"farm"}));
    } else if (roll < 0.68) {
      const auto lot = pick(st.live_assets_of("farm"));
      auto t = net.trade_payload(lot, "farm", "depot", "t" + std::to_string(w.accepted) + "-" + lot, "depot/cold",
                                 {term("ship", unit(rng), epoch, unit(rng) < 0.8 ? std::optional(epoch) : std::nullopt),
                                  term("pay", unit(rng), epoch + 1, std::nullopt)});
      t.quantity = std::min(1.0 + std::floor(unit(rng) * 5.0), st.asset(lot)->quantity);
      submit(net.keys.sign({"trade/" + t.new_batch_id, epoch, t, {}}, {"farm", "depot"}));
    } else if (roll < 0.8) {
      ledger::InspectPayload in;
      in.authority_id = Network::kAuthority;
      in.subject = unit(rng) < 0.5 ? "farm" : "depot";
      in.rating = unit(rng);
      in.report_hash = crypto::sha256("report " + std::to_string(w.accepted));
      submit(net.keys.sign({"inspect/" + std::to_string(w.accepted), epoch, in, {}}, {Network::kAuthority}));
    } else {
      ledger::QueryPayload q;
      const double k = unit(rng);
      q.kind = k < 0.4 ? ledger::QueryKind::provenance : k < 0.7 ? ledger::QueryKind::trust
                                                                 : ledger::QueryKind::reputation;
      q.subject = q.kind == ledger::QueryKind::reputation ? std::string("farm") : pick(st.live_assets_of("farm"));
      submit({"query/" + std::to_string(w.accepted), epoch, q, {}});
    }
    if (current.size() >= 1 + rng() % 40) {
      net.ledger.seal_block();
      w.blocks.push_back(std::move(current));
      current.clear();
      ++epoch;
    }
  }
  net.ledger.seal_block();
  w.blocks.push_back(std::move(current));
  return w;
}

}  // namespace testnet
