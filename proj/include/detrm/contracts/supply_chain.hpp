#pragma once

#include <memory>

#include "detrm/contracts/world_state.hpp"
#include "detrm/ledger/ledger.hpp"

namespace detrm::contracts {

/// The supply-chain contracts as a ledger state machine.
class SupplyChainMachine final : public ledger::StateMachine {
 public:
  std::optional<crypto::PublicKey> signer_key(const ledger::Transaction& tx,
                                              std::string_view signer) const override;
  ledger::ApplyResult apply(const ledger::Transaction& tx) override;
  crypto::Digest state_root() const override { return state_.state_root(); }

  const WorldState& state() const noexcept { return state_; }
  /// Immutable copy for readers that outlive further writes.
  std::shared_ptr<const WorldState> snapshot() const { return std::make_shared<const WorldState>(state_); }

 private:
  WorldState state_;
};

ledger::MachineFactory supply_chain_factory();

/// The machine behind a ledger built from supply_chain_factory().
const SupplyChainMachine& supply_chain(const ledger::Ledger& ledger);

}  // namespace detrm::contracts
