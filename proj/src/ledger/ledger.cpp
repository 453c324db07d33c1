#include "detrm/ledger/ledger.hpp"

#include <set>

namespace detrm::ledger {

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::alert: return "alert";
    case EventKind::commodity_trust: return "commodity_trust";
    case EventKind::participant_trust: return "participant_trust";
    case EventKind::endorsement: return "endorsement";
    case EventKind::reputation: return "reputation";
  }
  return "unknown";
}

crypto::Digest compute_block_hash(const Block& block) {
  codec::Writer w;
  w.u64(block.height);
  w.fixed(block.prev_hash);
  w.u32(static_cast<std::uint32_t>(block.transactions.size()));
  for (const auto& tx : block.transactions) encode_signed(w, tx);
  w.fixed(block.state_root);
  return crypto::sha256(w.bytes());
}

namespace {

struct Rejection {
  Errc code;
  std::string message;
};

std::optional<Rejection> check_signatures(const StateMachine& machine, const Transaction& tx) {
  if (tx.kind() == TxKind::query) {
    if (!tx.signatures.empty()) return Rejection{Errc::MalformedTransaction, "query transactions are unsigned"};
    return std::nullopt;
  }
  if (tx.signatures.empty()) return Rejection{Errc::MissingSignature, "transaction " + tx.tx_id + " is unsigned"};

  std::set<std::string_view> seen;
  const auto digest = signing_digest(tx);
  for (const auto& sig : tx.signatures) {
    if (!seen.insert(sig.signer).second) {
      return Rejection{Errc::MalformedTransaction, "duplicate signer " + sig.signer};
    }
    const auto key = machine.signer_key(tx, sig.signer);
    if (!key) return Rejection{Errc::UnknownSigner, sig.signer};
    if (!crypto::verify(*key, digest, sig.bytes)) return Rejection{Errc::InvalidSignature, sig.signer};
  }
  return std::nullopt;
}

}  // namespace

bool validate_chain(const std::vector<Block>& blocks, const MachineFactory& factory) {
  if (blocks.empty()) return false;
  auto machine = factory();
  crypto::Digest prev = crypto::kZeroDigest;
  for (std::size_t h = 0; h < blocks.size(); ++h) {
    const Block& b = blocks[h];
    if (b.height != h || b.prev_hash != prev) return false;
    if (compute_block_hash(b) != b.block_hash) return false;
    for (const auto& tx : b.transactions) {
      if (check_signatures(*machine, tx)) return false;
      try {
        machine->apply(tx);
      } catch (const Error&) {
        return false;
      }
    }
    if (machine->state_root() != b.state_root) return false;
    prev = b.block_hash;
  }
  return true;
}

Ledger::Ledger(MachineFactory factory) : factory_(std::move(factory)), machine_(factory_()) {}

std::unique_ptr<Ledger> Ledger::from_blocks(std::vector<Block> blocks, MachineFactory factory) {
  if (!detrm::ledger::validate_chain(blocks, factory)) {
    throw Error(Errc::ChainInvalid, "chain failed validation");
  }
  auto ledger = std::make_unique<Ledger>(std::move(factory));
  for (auto& b : blocks) {
    for (const auto& tx : b.transactions) ledger->machine_->apply(tx);
    ledger->chain_.push_back(std::make_shared<const Block>(std::move(b)));
  }
  return ledger;
}

Receipt Ledger::submit(Transaction tx) {
  std::lock_guard lock(write_mutex_);
  return apply_locked(std::move(tx));
}

Receipt Ledger::apply_locked(Transaction tx) {
  Receipt receipt;
  receipt.tx_id = tx.tx_id;
  if (auto rejection = check_signatures(*machine_, tx)) {
    receipt.error = rejection->code;
    receipt.message = std::move(rejection->message);
    return receipt;
  }
  try {
    auto result = machine_->apply(tx);
    receipt.events = std::move(result.events);
    receipt.response = std::move(result.response);
  } catch (const Error& e) {
    receipt.error = Errc::HandlerRejection;
    receipt.cause = e.code();
    receipt.message = e.what();
    return receipt;
  }
  receipt.status = TxStatus::accepted;
  pending_.push_back(std::move(tx));
  for (const auto& sink : sinks_) {
    for (const auto& ev : receipt.events) sink(ev);
  }
  return receipt;
}

Block Ledger::seal_block() {
  std::lock_guard lock(write_mutex_);
  Block block;
  {
    std::shared_lock read(chain_mutex_);
    block.height = chain_.size();
    block.prev_hash = chain_.empty() ? crypto::kZeroDigest : chain_.back()->block_hash;
  }
  block.transactions = std::move(pending_);
  pending_.clear();
  block.state_root = machine_->state_root();
  block.block_hash = compute_block_hash(block);

  auto stored = std::make_shared<const Block>(block);
  std::unique_lock write(chain_mutex_);
  chain_.push_back(std::move(stored));
  return block;
}

bool Ledger::validate_chain() const { return detrm::ledger::validate_chain(blocks(), factory_); }

std::size_t Ledger::height() const {
  std::shared_lock read(chain_mutex_);
  return chain_.size();
}

std::size_t Ledger::pending_count() const {
  std::lock_guard lock(write_mutex_);
  return pending_.size();
}

std::shared_ptr<const Block> Ledger::block(std::size_t height) const {
  std::shared_lock read(chain_mutex_);
  if (height >= chain_.size()) return nullptr;
  return chain_[height];
}

std::vector<Block> Ledger::blocks() const {
  std::shared_lock read(chain_mutex_);
  std::vector<Block> out;
  out.reserve(chain_.size());
  for (const auto& b : chain_) out.push_back(*b);
  return out;
}

crypto::Digest Ledger::state_root() const {
  std::lock_guard lock(write_mutex_);
  return machine_->state_root();
}

void Ledger::subscribe(EventSink sink) {
  std::lock_guard lock(write_mutex_);
  sinks_.push_back(std::move(sink));
}

}  // namespace detrm::ledger
