#pragma once

// Small supply-chain network on a fresh ledger, for contract-level tests.

#include <string>
#include <vector>

#include "detrm/contracts/supply_chain.hpp"
#include "detrm/scenario/runner.hpp"

namespace testnet {

using namespace detrm;
using ledger::Receipt;
using ledger::Transaction;

inline std::vector<trm::Observation> readings(const std::string& location, std::uint64_t epoch,
                                              const std::vector<double>& values, double confidence = 1.0) {
  std::vector<trm::Observation> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.push_back({location + "/s" + std::to_string(i + 1), values[i], confidence, epoch, location});
  }
  return out;
}

inline ledger::TradeTerm term(std::string id, double weight, std::uint64_t deadline,
                              std::optional<std::uint64_t> fulfilled_at) {
  return {std::move(id), "", weight, deadline, fulfilled_at};
}

class Network {
 public:
  static constexpr const char* kAuthority = "agency";

  explicit Network(trm::TrmParams params = {}) : keys(99), ledger(contracts::supply_chain_factory()) {
    ledger::GenesisPayload g;
    g.params = params;
    g.authorities.push_back({kAuthority, {}, keys.key(kAuthority).public_key()});
    expect_ok(ledger.submit(keys.sign({"genesis", 0, g, {}}, {kAuthority})));
  }

  const contracts::WorldState& state() const { return contracts::supply_chain(ledger).state(); }

  Receipt join(const std::string& id, std::vector<ledger::Role> roles, std::vector<std::string> locations,
               const std::string& approver = kAuthority, bool authority = false) {
    ledger::JoinPayload j{id, std::move(roles), authority, {}, std::move(locations), keys.key(id).public_key()};
    return ledger.submit(keys.sign({"join/" + id, 0, j, {}}, {approver}));
  }

  Receipt deploy(const std::string& type, double t_min, double t_max, const std::string& participant,
                 std::uint64_t interval = 1, std::optional<double> gamma = std::nullopt) {
    ledger::DeployPayload d{type, t_min, t_max, interval, gamma, kAuthority, participant};
    return ledger.submit(keys.sign({"contract/" + type, 0, d, {}}, {kAuthority, participant}));
  }

  Receipt create(const std::string& owner, const std::string& batch, const std::string& type,
                 const std::string& location, double quantity = 1.0) {
    ledger::CreatePayload c{owner, type, location, quantity, {}};
    return ledger.submit(keys.sign({batch, 0, c, {}}, {owner}));
  }

  Receipt monitor(const std::string& owner, const std::string& location, std::vector<trm::Observation> rs,
                  std::uint64_t epoch) {
    ledger::MonitorPayload m{"gw/" + location, location, std::move(rs)};
    return ledger.submit(
        keys.sign({"monitor/" + location + "/" + std::to_string(epoch) + "/" + std::to_string(++seq_), epoch, m, {}},
                  {owner}));
  }

  Receipt produce(const std::string& producer, std::vector<std::string> sources, const std::string& out_batch,
                  const std::string& type, const std::string& location) {
    ledger::ProducePayload p;
    p.producer = producer;
    p.sources = std::move(sources);
    p.outputs.push_back({out_batch, type, location, 1.0, {}});
    return ledger.submit(keys.sign({out_batch, 1, p, {}}, {producer}));
  }

  ledger::TradePayload trade_payload(const std::string& batch, const std::string& seller, const std::string& buyer,
                                     const std::string& new_batch, const std::string& destination,
                                     std::vector<ledger::TradeTerm> terms) {
    ledger::TradePayload t;
    t.asset_batch_id = batch;
    t.seller = seller;
    t.buyer = buyer;
    t.new_batch_id = new_batch;
    t.destination_location = destination;
    t.terms = std::move(terms);
    return t;
  }

  Receipt trade(const ledger::TradePayload& t, std::uint64_t epoch) {
    return ledger.submit(keys.sign({"trade/" + t.new_batch_id, epoch, t, {}}, {t.seller, t.buyer}));
  }

  Receipt inspect(const std::string& authority, const std::string& subject, double rating, std::uint64_t epoch = 1) {
    ledger::InspectPayload in;
    in.authority_id = authority;
    in.subject = subject;
    in.rating = rating;
    in.report_hash = crypto::sha256("report " + subject + std::to_string(seq_));
    return ledger.submit(keys.sign({"inspect/" + std::to_string(++seq_), epoch, in, {}}, {authority}));
  }

  static void expect_ok(const Receipt& r) {
    if (!r.accepted()) throw std::runtime_error("setup transaction rejected: " + r.message);
  }

  scenario::Keyring keys;
  ledger::Ledger ledger;

 private:
  std::size_t seq_ = 0;
};

/// Network with producer `farm` (location farm/cold), distributor `depot`
/// (depot/cold), retailer `shop` (shop/fridge) and a milk contract.
inline void populate(Network& net) {
  using ledger::Role;
  Network::expect_ok(net.join("farm", {Role::producer}, {"farm/cold", "farm/line"}));
  Network::expect_ok(net.join("depot", {Role::distributor}, {"depot/cold"}));
  Network::expect_ok(net.join("shop", {Role::retailer}, {"shop/fridge"}));
  Network::expect_ok(net.deploy("milk", 2.0, 8.0, "farm"));
}

}  // namespace testnet
