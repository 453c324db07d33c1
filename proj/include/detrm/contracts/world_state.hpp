#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "detrm/ledger/crypto.hpp"
#include "detrm/ledger/event.hpp"
#include "detrm/ledger/transaction.hpp"
#include "detrm/trm/engine.hpp"

namespace detrm::contracts {

using ledger::Properties;
using ledger::Role;

struct Participant {
  std::string id;
  std::vector<Role> roles;
  bool authority = false;
  Properties properties;
  std::vector<std::string> locations;
  crypto::PublicKey public_key{};
  std::string approved_by;
  std::uint64_t joined_at = 0;
  trm::ParticipantScores scores;

  bool has_role(Role role) const noexcept;
};

enum class AssetOrigin : std::uint8_t { created = 0, produced = 1, traded = 2 };

std::string_view to_string(AssetOrigin origin) noexcept;

struct DigitalAsset {
  std::string batch_id;
  std::string owner;
  std::string commodity_type;
  std::string location_id;
  double quantity = 1.0;
  Properties properties;
  std::vector<std::string> source_batch_ids;
  AssetOrigin origin = AssetOrigin::created;
  trm::CommodityTrust trust;
  std::vector<crypto::Digest> off_chain_refs;
  bool consumed = false;
  std::uint64_t created_at = 0;

  bool live() const noexcept { return !consumed; }
};

struct CommodityContract {
  std::string contract_id;
  std::string commodity_type;
  double t_min = 0.0;
  double t_max = 0.0;
  std::uint64_t monitor_interval = 1;
  std::optional<double> gamma;
  std::string authority_id;
  std::string participant_id;
};

struct Endorsement {
  std::string inspection_id;
  std::string authority_id;
  std::string subject;
  std::optional<std::string> asset_batch_id;
  double rating = 0.0;
  crypto::Digest report_hash{};
  std::uint64_t epoch = 0;
};

struct Alert {
  std::string batch_id;
  std::uint64_t epoch = 0;
  std::string tx_id;
  std::vector<std::string> sensor_ids;
  std::vector<double> readings;
};

/// Everything one accepted transaction changes. Upserts are applied in
/// order, so a later record for the same key wins.
struct Delta {
  std::optional<trm::TrmParams> params;
  std::vector<Participant> participants;
  std::vector<DigitalAsset> assets;
  std::vector<CommodityContract> contracts;
  std::vector<std::pair<std::string, std::string>> locations;  // location -> owner
  std::vector<Endorsement> endorsements;
  std::vector<Alert> alerts;
  std::optional<std::string> tx_id;
  std::vector<ledger::Event> events;
  std::string response;

  bool mutates() const noexcept {
    return params || !participants.empty() || !assets.empty() || !contracts.empty() ||
           !locations.empty() || !endorsements.empty() || !alerts.empty() || tx_id;
  }
};

/// Typed key-value world state. Every record has a leaf digest. Leaves
/// fall into 256 buckets by the first byte of sha256(key); a bucket hashes
/// its sorted (key, leaf) list and the root hashes the bucket digests in
/// order.
class WorldState {
 public:
  template <typename T>
  using Table = std::map<std::string, T, std::less<>>;

  bool initialised() const noexcept { return params_.has_value(); }
  /// Throws Error(NotInitialised) before genesis.
  const trm::TrmParams& params() const;

  const Participant* participant(std::string_view id) const;
  const DigitalAsset* asset(std::string_view batch_id) const;
  const CommodityContract* contract(std::string_view commodity_type) const;
  std::optional<std::string> location_owner(std::string_view location_id) const;
  bool seen_tx(std::string_view tx_id) const;

  const std::set<std::string>& live_assets_at(std::string_view location_id) const;
  const std::set<std::string>& live_assets_of(std::string_view owner) const;

  const Table<Participant>& participants() const noexcept { return participants_; }
  const Table<DigitalAsset>& assets() const noexcept { return assets_; }
  const Table<CommodityContract>& contracts() const noexcept { return contracts_; }
  const std::vector<Endorsement>& endorsements() const noexcept { return endorsements_; }
  const std::vector<Alert>& alerts() const noexcept { return alerts_; }

  /// Commodity-specific parameters: the contract's band and optional γ.
  trm::TrmParams params_for(const CommodityContract& contract) const;

  void apply(Delta delta);
  crypto::Digest state_root() const;

 private:
  void set_leaf(std::string key, const codec::Bytes& record);
  void set_leaf(std::string key, const crypto::Digest& leaf);
  void index_asset(const DigitalAsset& asset, bool add);

  std::optional<trm::TrmParams> params_;
  Table<Participant> participants_;
  Table<DigitalAsset> assets_;
  Table<CommodityContract> contracts_;
  Table<std::string> locations_;
  std::set<std::string, std::less<>> tx_ids_;
  std::vector<Endorsement> endorsements_;
  std::vector<Alert> alerts_;

  Table<std::set<std::string>> by_location_;
  Table<std::set<std::string>> by_owner_;

  struct Bucket {
    std::map<std::string, crypto::Digest> leaves;
    mutable std::optional<crypto::Digest> digest;
  };
  std::array<Bucket, 256> buckets_;
  mutable std::optional<crypto::Digest> root_cache_;
};

}  // namespace detrm::contracts
