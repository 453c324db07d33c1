#include "detrm/contracts/world_state.hpp"

#include <algorithm>
#include <cstdio>

#include "detrm/error.hpp"
#include "detrm/ledger/codec.hpp"

namespace detrm::contracts {

bool Participant::has_role(Role role) const noexcept {
  return std::find(roles.begin(), roles.end(), role) != roles.end();
}

std::string_view to_string(AssetOrigin origin) noexcept {
  switch (origin) {
    case AssetOrigin::created: return "created";
    case AssetOrigin::produced: return "produced";
    case AssetOrigin::traded: return "traded";
  }
  return "unknown";
}

namespace {

using codec::Writer;

void put(Writer& w, const Properties& props) {
  w.u32(static_cast<std::uint32_t>(props.size()));
  for (const auto& [k, v] : props) {
    w.str(k);
    w.str(v);
  }
}

void put(Writer& w, const std::vector<std::string>& items) {
  w.u32(static_cast<std::uint32_t>(items.size()));
  for (const auto& s : items) w.str(s);
}

codec::Bytes encode(const trm::TrmParams& p) {
  Writer w;
  for (double v : {p.gamma, p.delta_max, p.delta_min, p.t_min, p.t_max, p.weights.trust, p.weights.participant,
                   p.weights.endorsement, p.support_epsilon}) {
    w.f64(v);
  }
  w.u64(p.y_min_sensors);
  w.u8(static_cast<std::uint8_t>(p.evidence_mode));
  return std::move(w).bytes();
}

codec::Bytes encode(const Participant& p) {
  Writer w;
  w.str(p.id);
  w.u32(static_cast<std::uint32_t>(p.roles.size()));
  for (Role r : p.roles) w.u8(static_cast<std::uint8_t>(r));
  w.boolean(p.authority);
  put(w, p.properties);
  put(w, p.locations);
  w.fixed(p.public_key);
  w.str(p.approved_by);
  w.u64(p.joined_at);
  const auto& s = p.scores;
  w.f64(s.participant_trust);
  w.f64(s.endorsement);
  w.f64(s.commodity_mean);
  w.f64(s.reputation);
  w.u64(s.trades);
  w.u64(s.endorsements);
  return std::move(w).bytes();
}

codec::Bytes encode(const DigitalAsset& a) {
  Writer w;
  w.str(a.batch_id);
  w.str(a.owner);
  w.str(a.commodity_type);
  w.str(a.location_id);
  w.f64(a.quantity);
  put(w, a.properties);
  put(w, a.source_batch_ids);
  w.u8(static_cast<std::uint8_t>(a.origin));
  w.f64(a.trust.raw);
  w.f64(a.trust.trust);
  w.u64(a.trust.observations);
  w.u32(static_cast<std::uint32_t>(a.off_chain_refs.size()));
  for (const auto& d : a.off_chain_refs) w.fixed(d);
  w.boolean(a.consumed);
  w.u64(a.created_at);
  return std::move(w).bytes();
}

codec::Bytes encode(const CommodityContract& c) {
  Writer w;
  w.str(c.contract_id);
  w.str(c.commodity_type);
  w.f64(c.t_min);
  w.f64(c.t_max);
  w.u64(c.monitor_interval);
  w.boolean(c.gamma.has_value());
  if (c.gamma) w.f64(*c.gamma);
  w.str(c.authority_id);
  w.str(c.participant_id);
  return std::move(w).bytes();
}

codec::Bytes encode(const Endorsement& e) {
  Writer w;
  w.str(e.inspection_id);
  w.str(e.authority_id);
  w.str(e.subject);
  w.boolean(e.asset_batch_id.has_value());
  if (e.asset_batch_id) w.str(*e.asset_batch_id);
  w.f64(e.rating);
  w.fixed(e.report_hash);
  w.u64(e.epoch);
  return std::move(w).bytes();
}

codec::Bytes encode(const Alert& a) {
  Writer w;
  w.str(a.batch_id);
  w.u64(a.epoch);
  w.str(a.tx_id);
  put(w, a.sensor_ids);
  w.u32(static_cast<std::uint32_t>(a.readings.size()));
  for (double v : a.readings) w.f64(v);
  return std::move(w).bytes();
}

std::string sequence_key(std::string_view prefix, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%012zu", n);
  return std::string(prefix) + buf;
}

const std::set<std::string> kEmptySet;

}  // namespace

const trm::TrmParams& WorldState::params() const {
  if (!params_) throw Error(Errc::NotInitialised, "network has no genesis yet");
  return *params_;
}

const Participant* WorldState::participant(std::string_view id) const {
  auto it = participants_.find(id);
  return it == participants_.end() ? nullptr : &it->second;
}

const DigitalAsset* WorldState::asset(std::string_view batch_id) const {
  auto it = assets_.find(batch_id);
  return it == assets_.end() ? nullptr : &it->second;
}

const CommodityContract* WorldState::contract(std::string_view commodity_type) const {
  auto it = contracts_.find(commodity_type);
  return it == contracts_.end() ? nullptr : &it->second;
}

std::optional<std::string> WorldState::location_owner(std::string_view location_id) const {
  auto it = locations_.find(location_id);
  if (it == locations_.end()) return std::nullopt;
  return it->second;
}

bool WorldState::seen_tx(std::string_view tx_id) const { return tx_ids_.find(tx_id) != tx_ids_.end(); }

const std::set<std::string>& WorldState::live_assets_at(std::string_view location_id) const {
  auto it = by_location_.find(location_id);
  return it == by_location_.end() ? kEmptySet : it->second;
}

const std::set<std::string>& WorldState::live_assets_of(std::string_view owner) const {
  auto it = by_owner_.find(owner);
  return it == by_owner_.end() ? kEmptySet : it->second;
}

trm::TrmParams WorldState::params_for(const CommodityContract& contract) const {
  trm::TrmParams p = params().with_band(contract.t_min, contract.t_max);
  if (contract.gamma) p.gamma = *contract.gamma;
  return p;
}

void WorldState::set_leaf(std::string key, const codec::Bytes& record) { set_leaf(std::move(key), crypto::sha256(record)); }

void WorldState::set_leaf(std::string key, const crypto::Digest& leaf) {
  auto& b = buckets_[crypto::sha256(key)[0]];
  b.leaves[std::move(key)] = leaf;
  b.digest.reset();
}

void WorldState::index_asset(const DigitalAsset& asset, bool add) {
  if (!asset.live()) return;
  if (add) {
    by_location_[asset.location_id].insert(asset.batch_id);
    by_owner_[asset.owner].insert(asset.batch_id);
    return;
  }
  if (auto it = by_location_.find(asset.location_id); it != by_location_.end()) it->second.erase(asset.batch_id);
  if (auto it = by_owner_.find(asset.owner); it != by_owner_.end()) it->second.erase(asset.batch_id);
}

void WorldState::apply(Delta delta) {
  if (!delta.mutates()) return;
  root_cache_.reset();

  if (delta.params) {
    set_leaf("params", encode(*delta.params));
    params_ = *delta.params;
  }
  for (auto& p : delta.participants) {
    set_leaf("participant/" + p.id, encode(p));
    std::string id = p.id;
    participants_.insert_or_assign(std::move(id), std::move(p));
  }
  for (auto& c : delta.contracts) {
    set_leaf("contract/" + c.commodity_type, encode(c));
    std::string key = c.commodity_type;
    contracts_.insert_or_assign(std::move(key), std::move(c));
  }
  for (auto& [location, owner] : delta.locations) {
    codec::Writer w;
    w.str(owner);
    set_leaf("location/" + location, w.bytes());
    locations_.insert_or_assign(location, owner);
  }
  for (auto& a : delta.assets) {
    if (auto it = assets_.find(a.batch_id); it != assets_.end()) index_asset(it->second, false);
    index_asset(a, true);
    set_leaf("asset/" + a.batch_id, encode(a));
    std::string key = a.batch_id;
    assets_.insert_or_assign(std::move(key), std::move(a));
  }
  for (auto& e : delta.endorsements) {
    set_leaf(sequence_key("endorsement/", endorsements_.size()), encode(e));
    endorsements_.push_back(std::move(e));
  }
  for (auto& a : delta.alerts) {
    set_leaf(sequence_key("alert/", alerts_.size()), encode(a));
    alerts_.push_back(std::move(a));
  }
  if (delta.tx_id) {
    set_leaf("tx/" + *delta.tx_id, crypto::kZeroDigest);
    tx_ids_.insert(std::move(*delta.tx_id));
  }
}

crypto::Digest WorldState::state_root() const {
  if (root_cache_) return *root_cache_;
  codec::Writer root;
  for (const auto& b : buckets_) {
    if (!b.digest) {
      codec::Writer w;
      w.u64(b.leaves.size());
      for (const auto& [key, digest] : b.leaves) {
        w.str(key);
        w.fixed(digest);
      }
      b.digest = crypto::sha256(w.bytes());
    }
    root.fixed(*b.digest);
  }
  root_cache_ = crypto::sha256(root.bytes());
  return *root_cache_;
}

}  // namespace detrm::contracts
