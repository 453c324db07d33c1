#pragma once

// Drives a scenario: genesis block with membership, contracts and
// initial lots, then one round per epoch (gateway monitor, scheduled
// actions, seal).

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "detrm/contracts/world_state.hpp"
#include "detrm/error.hpp"
#include "detrm/ledger/ledger.hpp"
#include "detrm/ledger/offchain_store.hpp"
#include "detrm/scenario/config.hpp"
#include "detrm/scenario/timeseries.hpp"

namespace detrm::scenario {

/// Deterministic per-member keys for one scenario seed.
class Keyring {
 public:
  explicit Keyring(std::uint64_t seed) : seed_(seed) {}

  const crypto::KeyPair& key(const std::string& member);
  ledger::Transaction sign(ledger::Transaction tx, std::initializer_list<std::string> signers);

 private:
  std::uint64_t seed_;
  std::map<std::string, crypto::KeyPair> keys_;
};

struct RejectedTx {
  std::uint64_t epoch = 0;
  std::string tx_id;
  ledger::TxKind kind = ledger::TxKind::query;
  Errc error = Errc::HandlerRejection;
  std::optional<Errc> cause;
  std::string message;
};

struct ScenarioResult {
  std::string name;
  std::uint64_t seed = 0;
  std::uint64_t epochs = 0;
  TimeSeries series;
  std::unique_ptr<ledger::Ledger> ledger;
  std::unique_ptr<ledger::OffChainStore> store;
  std::vector<RejectedTx> rejections;
  std::vector<ledger::Event> events;
  std::size_t accepted = 0;

  const contracts::WorldState& state() const;
};

/// Throws Error(ConfigError) when the fixed setup (genesis block) is
/// rejected by the contracts. Rejected scheduled actions are recorded,
/// not thrown.
ScenarioResult run_scenario(const ScenarioConfig& config,
                            std::optional<std::filesystem::path> offchain_dir = std::nullopt);

nlohmann::json summarize(const ScenarioResult& result);

}  // namespace detrm::scenario
