#include "detrm/contracts/supply_chain.hpp"

#include "detrm/contracts/handlers.hpp"

namespace detrm::contracts {

std::optional<crypto::PublicKey> SupplyChainMachine::signer_key(const ledger::Transaction& tx,
                                                                std::string_view signer) const {
  if (tx.kind() == ledger::TxKind::genesis) {
    for (const auto& a : tx.as<ledger::GenesisPayload>().authorities) {
      if (a.id == signer) return a.public_key;
    }
    return std::nullopt;
  }
  if (const Participant* p = state_.participant(signer)) return p->public_key;
  return std::nullopt;
}

ledger::ApplyResult SupplyChainMachine::apply(const ledger::Transaction& tx) {
  Delta delta = handle(state_, tx);
  ledger::ApplyResult result{std::move(delta.events), std::move(delta.response)};
  state_.apply(std::move(delta));
  return result;
}

ledger::MachineFactory supply_chain_factory() {
  return [] { return std::make_unique<SupplyChainMachine>(); };
}

const SupplyChainMachine& supply_chain(const ledger::Ledger& ledger) {
  return dynamic_cast<const SupplyChainMachine&>(ledger.machine());
}

}  // namespace detrm::contracts
