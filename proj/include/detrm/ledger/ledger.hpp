#pragma once

// Single-writer simulated consortium ledger: signature and membership
// checks, contract dispatch through a StateMachine, FIFO blocks chained
// by SHA-256.

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "detrm/error.hpp"
#include "detrm/ledger/crypto.hpp"
#include "detrm/ledger/event.hpp"
#include "detrm/ledger/transaction.hpp"

namespace detrm::ledger {

struct ApplyResult {
  std::vector<Event> events;
  std::string response;  // JSON body for queries and a few handlers
};

/// World-state owner the ledger dispatches into. apply() must leave the
/// state untouched when it throws.
class StateMachine {
 public:
  virtual ~StateMachine() = default;

  /// Key a signature by `signer` on `tx` must verify against, or nullopt
  /// when the signer is not a member.
  virtual std::optional<crypto::PublicKey> signer_key(const Transaction& tx,
                                                      std::string_view signer) const = 0;
  virtual ApplyResult apply(const Transaction& tx) = 0;
  virtual crypto::Digest state_root() const = 0;
};

using MachineFactory = std::function<std::unique_ptr<StateMachine>()>;

struct Block {
  std::uint64_t height = 0;
  crypto::Digest prev_hash{};
  std::vector<Transaction> transactions;
  crypto::Digest state_root{};
  crypto::Digest block_hash{};
};

crypto::Digest compute_block_hash(const Block& block);

enum class TxStatus { accepted, rejected };

struct Receipt {
  std::string tx_id;
  TxStatus status = TxStatus::rejected;
  std::optional<Errc> error;  // ledger-level reason
  std::optional<Errc> cause;  // contract error behind HandlerRejection
  std::string message;
  std::vector<Event> events;
  std::string response;

  bool accepted() const noexcept { return status == TxStatus::accepted; }
};

/// Checks linkage, block hashes and every signature, replaying the chain
/// on a fresh machine and comparing each block's state root.
bool validate_chain(const std::vector<Block>& blocks, const MachineFactory& factory);

class Ledger {
 public:
  using EventSink = std::function<void(const Event&)>;

  explicit Ledger(MachineFactory factory);

  /// Rebuilds a ledger by replaying `blocks`; throws Error(ChainInvalid).
  static std::unique_ptr<Ledger> from_blocks(std::vector<Block> blocks, MachineFactory factory);

  Receipt submit(Transaction tx);
  Block seal_block();

  bool validate_chain() const;

  std::size_t height() const;
  std::size_t pending_count() const;
  std::shared_ptr<const Block> block(std::size_t height) const;
  std::vector<Block> blocks() const;
  crypto::Digest state_root() const;

  /// Read access to the machine; callers must not race with writers.
  const StateMachine& machine() const noexcept { return *machine_; }

  void subscribe(EventSink sink);

 private:
  Receipt apply_locked(Transaction tx);

  MachineFactory factory_;
  std::unique_ptr<StateMachine> machine_;
  std::vector<Transaction> pending_;
  std::vector<std::shared_ptr<const Block>> chain_;
  std::vector<EventSink> sinks_;
  mutable std::mutex write_mutex_;
  mutable std::shared_mutex chain_mutex_;
};

}  // namespace detrm::ledger
