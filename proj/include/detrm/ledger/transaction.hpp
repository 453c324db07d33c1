#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "detrm/ledger/codec.hpp"
#include "detrm/ledger/crypto.hpp"
#include "detrm/trm/engine.hpp"

namespace detrm::ledger {

using Properties = std::map<std::string, std::string>;

enum class Role : std::uint8_t { producer = 0, distributor = 1, retailer = 2 };

std::string_view to_string(Role role) noexcept;
std::optional<Role> role_from_string(std::string_view name) noexcept;

struct GenesisAuthority {
  std::string id;
  Properties properties;
  crypto::PublicKey public_key{};
};

/// Network bootstrap: model constants plus the founding authorities.
struct GenesisPayload {
  trm::TrmParams params;
  std::vector<GenesisAuthority> authorities;
};

/// Join request approved (and signed) by an authority.
struct JoinPayload {
  std::string participant_id;
  std::vector<Role> roles;
  bool authority = false;
  Properties properties;
  std::vector<std::string> locations;
  crypto::PublicKey public_key{};
};

/// Commodity contract; multisig by `authority_id` and `participant_id`.
struct DeployPayload {
  std::string commodity_type;
  double t_min = 0.0;
  double t_max = 0.0;
  std::uint64_t monitor_interval = 1;
  std::optional<double> gamma;
  std::string authority_id;
  std::string participant_id;
};

/// tx_id is the new batch id.
struct CreatePayload {
  std::string owner;
  std::string commodity_type;
  std::string location_id;
  double quantity = 1.0;
  Properties properties;
};

struct MonitorPayload {
  std::string gateway_id;
  std::string location_id;
  std::vector<trm::Observation> readings;
};

struct OutputLot {
  std::string batch_id;
  std::string commodity_type;
  std::string location_id;
  double quantity = 1.0;
  Properties properties;
};

/// tx_id must equal outputs.front().batch_id.
struct ProducePayload {
  std::string producer;
  std::vector<std::string> sources;
  std::vector<OutputLot> outputs;
  Properties process_params;
};

struct InspectPayload {
  std::string authority_id;
  std::string subject;
  std::optional<std::string> asset_batch_id;
  double rating = 0.0;
  crypto::Digest report_hash{};
};

struct TradeTerm {
  std::string term_id;
  std::string description;
  double weight = 0.0;
  std::uint64_t deadline = 0;
  std::optional<std::uint64_t> fulfilled_at;
};

/// Multisig by seller and buyer. An absent quantity transfers the whole lot.
struct TradePayload {
  std::string asset_batch_id;
  std::string seller;
  std::string buyer;
  std::string new_batch_id;
  std::optional<double> quantity;
  std::string destination_location;
  std::vector<TradeTerm> terms;
  std::optional<crypto::Digest> attachment_hash;
};

enum class QueryKind : std::uint8_t { provenance = 0, trust = 1, reputation = 2 };

std::string_view to_string(QueryKind kind) noexcept;
std::optional<QueryKind> query_kind_from_string(std::string_view name) noexcept;

struct QueryPayload {
  QueryKind kind = QueryKind::trust;
  std::string subject;
};

// Variant order fixes the on-wire kind byte.
using Payload = std::variant<GenesisPayload, JoinPayload, DeployPayload, CreatePayload, MonitorPayload,
                             ProducePayload, InspectPayload, TradePayload, QueryPayload>;

enum class TxKind : std::uint8_t {
  genesis = 0,
  join = 1,
  deploy = 2,
  create = 3,
  monitor = 4,
  produce = 5,
  inspect = 6,
  trade = 7,
  query = 8,
};

std::string_view to_string(TxKind kind) noexcept;

struct Signature {
  std::string signer;
  crypto::SignatureBytes bytes{};
};

struct Transaction {
  std::string tx_id;
  std::uint64_t timestamp = 0;
  Payload payload;
  std::vector<Signature> signatures;

  TxKind kind() const noexcept { return static_cast<TxKind>(payload.index()); }

  template <typename P>
  const P& as() const {
    return std::get<P>(payload);
  }

  bool signed_by(std::string_view signer) const noexcept;
};

inline constexpr std::uint8_t kEncodingVersion = 1;

/// Deterministic encoding of every field except the signatures.
codec::Bytes canonical_bytes(const Transaction& tx);

/// Inverse of canonical_bytes; the result carries no signatures.
/// Throws Error(MalformedTransaction).
Transaction decode_canonical(std::span<const std::uint8_t> bytes);

/// hash(canonical_bytes), the message every signer signs.
crypto::Digest signing_digest(const Transaction& tx);

/// Appends `signer`'s signature over signing_digest(tx).
Transaction sign_tx(Transaction tx, std::string signer, const crypto::KeyPair& key);

bool verify_signature(const Transaction& tx, const Signature& sig, const crypto::PublicKey& key);

/// canonical_bytes followed by the signature list; input to block hashing.
void encode_signed(codec::Writer& w, const Transaction& tx);

}  // namespace detrm::ledger
