#pragma once

// Contract handlers. Each is a pure function of (state, tx) returning the
// delta to apply; a rejected transaction throws Error and changes nothing.

#include "detrm/contracts/world_state.hpp"
#include "detrm/ledger/transaction.hpp"

namespace detrm::contracts {

using ledger::Transaction;

Delta handle_genesis(const WorldState& state, const Transaction& tx);
Delta handle_join(const WorldState& state, const Transaction& tx);
Delta handle_deploy(const WorldState& state, const Transaction& tx);
Delta handle_create(const WorldState& state, const Transaction& tx);
Delta handle_monitor(const WorldState& state, const Transaction& tx);
Delta handle_produce(const WorldState& state, const Transaction& tx);
Delta handle_inspect(const WorldState& state, const Transaction& tx);
Delta handle_trade(const WorldState& state, const Transaction& tx);
Delta handle_query(const WorldState& state, const Transaction& tx);

/// Routes by kind and enforces the rules shared by every kind: non-empty
/// tx_id, genesis first, and tx_id uniqueness for state-changing kinds.
Delta handle(const WorldState& state, const Transaction& tx);

/// Fulfilment flag for one trade term judged at `now`.
bool term_fulfilled(const ledger::TradeTerm& term, std::uint64_t now) noexcept;

}  // namespace detrm::contracts
