#include "detrm/contracts/handlers.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "detrm/contracts/query.hpp"
#include "detrm/error.hpp"

namespace detrm::contracts {

using ledger::Event;
using ledger::EventKind;

namespace {

void require(bool ok, Errc code, const std::string& message) {
  if (!ok) throw Error(code, message);
}

// Copy-on-write view used while a handler assembles its delta.
class Staging {
 public:
  Staging(const WorldState& base, const Transaction& tx) : base_(base), tx_(tx) {}

  const Participant* participant(std::string_view id) const {
    if (auto it = participants_.find(id); it != participants_.end()) return &it->second;
    return base_.participant(id);
  }

  Participant& edit_participant(std::string_view id) {
    if (auto it = participants_.find(id); it != participants_.end()) return it->second;
    const Participant* p = base_.participant(id);
    require(p != nullptr, Errc::UnknownParticipant, std::string(id));
    return participants_.emplace(std::string(id), *p).first->second;
  }

  const DigitalAsset* asset(std::string_view id) const {
    if (auto it = assets_.find(id); it != assets_.end()) return &it->second;
    return base_.asset(id);
  }

  DigitalAsset& edit_asset(std::string_view id) {
    if (auto it = assets_.find(id); it != assets_.end()) return it->second;
    const DigitalAsset* a = base_.asset(id);
    require(a != nullptr, Errc::UnknownAsset, std::string(id));
    return assets_.emplace(std::string(id), *a).first->second;
  }

  void add_asset(DigitalAsset asset) {
    std::string key = asset.batch_id;
    assets_.insert_or_assign(std::move(key), std::move(asset));
  }

  std::vector<double> live_trusts_of(std::string_view owner) const {
    std::set<std::string> ids = base_.live_assets_of(owner);
    for (const auto& [id, a] : assets_) {
      ids.erase(id);
      if (a.live() && a.owner == owner) ids.insert(id);
    }
    std::vector<double> trusts;
    trusts.reserve(ids.size());
    for (const auto& id : ids) trusts.push_back(asset(id)->trust.trust);
    return trusts;
  }

  void emit(std::string subject, EventKind kind, double old_value, double new_value) {
    Event ev;
    ev.subject = std::move(subject);
    ev.kind = kind;
    ev.old_value = old_value;
    ev.new_value = new_value;
    ev.epoch = tx_.timestamp;
    ev.tx_id = tx_.tx_id;
    events_.push_back(std::move(ev));
  }

  void emit(Event ev) { events_.push_back(std::move(ev)); }

  void refresh_reputation(std::string_view owner) {
    Participant& p = edit_participant(owner);
    const auto trusts = live_trusts_of(owner);
    const auto b = trm::reputation_breakdown(trusts, p.scores.participant_trust, p.scores.endorsement,
                                             base_.params());
    const double before = p.scores.reputation;
    p.scores.commodity_mean = b.commodity_mean;
    p.scores.reputation = b.reputation;
    if (before != b.reputation) emit(p.id, EventKind::reputation, before, b.reputation);
  }

  Delta finish(Delta delta = {}) {
    for (auto& [id, p] : participants_) delta.participants.push_back(std::move(p));
    for (auto& [id, a] : assets_) delta.assets.push_back(std::move(a));
    for (auto& ev : events_) delta.events.push_back(std::move(ev));
    delta.tx_id = tx_.tx_id;
    return delta;
  }

 private:
  const WorldState& base_;
  const Transaction& tx_;
  std::map<std::string, Participant, std::less<>> participants_;
  std::map<std::string, DigitalAsset, std::less<>> assets_;
  std::vector<Event> events_;
};

const Participant& known_participant(const WorldState& state, std::string_view id) {
  const Participant* p = state.participant(id);
  require(p != nullptr, Errc::UnknownParticipant, std::string(id));
  return *p;
}

// Location must exist and belong to `owner`.
void require_location_of(const WorldState& state, std::string_view location, std::string_view owner) {
  const auto holder = state.location_owner(location);
  require(holder && *holder == owner, Errc::UnknownLocation,
          std::string(location) + " is not a location of " + std::string(owner));
}

}  // namespace

bool term_fulfilled(const ledger::TradeTerm& term, std::uint64_t now) noexcept {
  return term.fulfilled_at && *term.fulfilled_at <= std::min(term.deadline, now);
}

Delta handle_genesis(const WorldState& state, const Transaction& tx) {
  require(!state.initialised(), Errc::GenesisAlreadyApplied, "network already bootstrapped");
  const auto& g = tx.as<ledger::GenesisPayload>();
  g.params.validate();
  require(!g.authorities.empty(), Errc::MalformedTransaction, "genesis lists no authorities");

  Delta delta;
  delta.params = g.params;
  std::set<std::string_view> ids;
  for (const auto& a : g.authorities) {
    require(!a.id.empty(), Errc::MalformedTransaction, "authority without id");
    require(ids.insert(a.id).second, Errc::DuplicateId, a.id);
    require(tx.signed_by(a.id), Errc::MissingCounterSignature, "genesis not signed by " + a.id);
    Participant p;
    p.id = a.id;
    p.authority = true;
    p.properties = a.properties;
    p.public_key = a.public_key;
    p.joined_at = tx.timestamp;
    delta.participants.push_back(std::move(p));
  }
  delta.tx_id = tx.tx_id;
  return delta;
}

Delta handle_join(const WorldState& state, const Transaction& tx) {
  const auto& j = tx.as<ledger::JoinPayload>();
  const Participant* approver = nullptr;
  for (const auto& sig : tx.signatures) {
    const Participant* p = state.participant(sig.signer);
    if (p && p->authority) {
      approver = p;
      break;
    }
  }
  require(approver != nullptr, Errc::NotAnAuthority, "join of " + j.participant_id + " not approved by an authority");
  require(!j.participant_id.empty(), Errc::MalformedTransaction, "empty participant id");
  require(state.participant(j.participant_id) == nullptr, Errc::DuplicateId, j.participant_id);
  require(j.authority || !j.roles.empty(), Errc::InvalidRoles, j.participant_id + " has no roles");
  std::set<ledger::Role> roles(j.roles.begin(), j.roles.end());
  require(roles.size() == j.roles.size(), Errc::InvalidRoles, "repeated role");

  Delta delta;
  std::set<std::string_view> locs;
  for (const auto& loc : j.locations) {
    require(!loc.empty(), Errc::MalformedTransaction, "empty location id");
    require(locs.insert(loc).second && !state.location_owner(loc), Errc::DuplicateLocation, loc);
    delta.locations.emplace_back(loc, j.participant_id);
  }
  Participant p;
  p.id = j.participant_id;
  p.roles = j.roles;
  p.authority = j.authority;
  p.properties = j.properties;
  p.locations = j.locations;
  p.public_key = j.public_key;
  p.approved_by = approver->id;
  p.joined_at = tx.timestamp;
  delta.participants.push_back(std::move(p));
  delta.tx_id = tx.tx_id;
  return delta;
}

Delta handle_deploy(const WorldState& state, const Transaction& tx) {
  const auto& d = tx.as<ledger::DeployPayload>();
  require(d.authority_id != d.participant_id && tx.signed_by(d.authority_id) && tx.signed_by(d.participant_id),
          Errc::MissingCounterSignature, "contract needs both the authority and the participant");
  const Participant& authority = known_participant(state, d.authority_id);
  require(authority.authority, Errc::NotAnAuthority, d.authority_id);
  known_participant(state, d.participant_id);
  require(d.t_min < d.t_max, Errc::InvalidThresholds, "t_min must be below t_max");
  require(d.monitor_interval >= 1, Errc::InvalidThresholds, "monitor interval must be at least 1");
  require(!d.gamma || (*d.gamma > 0.0 && *d.gamma <= 1.0), Errc::InvalidParams, "gamma must lie in (0, 1]");
  require(!d.commodity_type.empty(), Errc::MalformedTransaction, "empty commodity type");
  require(state.contract(d.commodity_type) == nullptr, Errc::DuplicateContract, d.commodity_type);

  CommodityContract c;
  c.contract_id = tx.tx_id;
  c.commodity_type = d.commodity_type;
  c.t_min = d.t_min;
  c.t_max = d.t_max;
  c.monitor_interval = d.monitor_interval;
  c.gamma = d.gamma;
  c.authority_id = d.authority_id;
  c.participant_id = d.participant_id;

  Delta delta;
  delta.contracts.push_back(std::move(c));
  delta.tx_id = tx.tx_id;
  return delta;
}

Delta handle_create(const WorldState& state, const Transaction& tx) {
  const auto& c = tx.as<ledger::CreatePayload>();
  require(tx.signed_by(c.owner), Errc::NotOwner, "create must be signed by " + c.owner);
  const Participant& owner = known_participant(state, c.owner);
  require(owner.has_role(Role::producer), Errc::NotAProducer, c.owner);
  require(state.contract(c.commodity_type) != nullptr, Errc::UnknownCommodityType, c.commodity_type);
  require(state.asset(tx.tx_id) == nullptr, Errc::DuplicateBatchId, tx.tx_id);
  require_location_of(state, c.location_id, c.owner);
  require(c.quantity > 0.0, Errc::MalformedTransaction, "quantity must be positive");

  Staging stage(state, tx);
  DigitalAsset a;
  a.batch_id = tx.tx_id;
  a.owner = c.owner;
  a.commodity_type = c.commodity_type;
  a.location_id = c.location_id;
  a.quantity = c.quantity;
  a.properties = c.properties;
  a.origin = AssetOrigin::created;
  a.created_at = tx.timestamp;
  stage.add_asset(std::move(a));
  stage.refresh_reputation(c.owner);
  return stage.finish();
}

Delta handle_monitor(const WorldState& state, const Transaction& tx) {
  const auto& m = tx.as<ledger::MonitorPayload>();
  const auto owner = state.location_owner(m.location_id);
  require(owner.has_value(), Errc::UnknownLocation, m.location_id);
  require(tx.signed_by(*owner), Errc::NotOwner, "monitor at " + m.location_id + " must be signed by " + *owner);
  const auto& params = state.params();
  require(m.readings.size() >= params.y_min_sensors, Errc::InsufficientRedundancy,
          std::to_string(m.readings.size()) + " readings, need " + std::to_string(params.y_min_sensors));
  std::set<std::string_view> sensors;
  for (const auto& r : m.readings) {
    require(r.location_id == m.location_id, Errc::InconsistentObservations,
            "reading from " + r.sensor_id + " is not at " + m.location_id);
    require(r.epoch == m.readings.front().epoch, Errc::InconsistentObservations, "readings span epochs");
    require(sensors.insert(r.sensor_id).second, Errc::InconsistentObservations, "repeated sensor " + r.sensor_id);
  }

  Staging stage(state, tx);
  Delta delta;
  for (const auto& id : state.live_assets_at(m.location_id)) {
    DigitalAsset& a = stage.edit_asset(id);
    const CommodityContract* contract = state.contract(a.commodity_type);
    require(contract != nullptr, Errc::UnknownCommodityType, a.commodity_type);
    const auto p = state.params_for(*contract);
    const double before = a.trust.trust;
    a.trust = trm::commodity_trust_step(a.trust, m.readings, p);
    stage.emit(a.batch_id, EventKind::commodity_trust, before, a.trust.trust);

    Alert alert;
    for (const auto& r : m.readings) {
      if (r.value < contract->t_min || r.value > contract->t_max) {
        alert.sensor_ids.push_back(r.sensor_id);
        alert.readings.push_back(r.value);
      }
    }
    if (!alert.sensor_ids.empty()) {
      alert.batch_id = a.batch_id;
      alert.epoch = tx.timestamp;
      alert.tx_id = tx.tx_id;
      Event ev;
      ev.subject = a.batch_id;
      ev.kind = EventKind::alert;
      ev.epoch = tx.timestamp;
      ev.tx_id = tx.tx_id;
      ev.sensor_ids = alert.sensor_ids;
      ev.readings = alert.readings;
      stage.emit(std::move(ev));
      delta.alerts.push_back(std::move(alert));
    }
  }
  if (!state.live_assets_at(m.location_id).empty()) stage.refresh_reputation(*owner);
  return stage.finish(std::move(delta));
}

Delta handle_produce(const WorldState& state, const Transaction& tx) {
  const auto& pr = tx.as<ledger::ProducePayload>();
  require(tx.signed_by(pr.producer), Errc::NotOwner, "produce must be signed by " + pr.producer);
  const Participant& producer = known_participant(state, pr.producer);
  require(producer.has_role(Role::producer), Errc::NotAProducer, pr.producer);
  require(!pr.sources.empty(), Errc::MalformedTransaction, "produce lists no sources");
  require(!pr.outputs.empty(), Errc::MalformedTransaction, "produce lists no outputs");
  require(tx.tx_id == pr.outputs.front().batch_id, Errc::MalformedTransaction,
          "tx_id must name the first output batch");

  std::set<std::string_view> seen_sources;
  double sum = 0.0;
  for (const auto& id : pr.sources) {
    require(seen_sources.insert(id).second, Errc::MalformedTransaction, "source " + id + " listed twice");
    const DigitalAsset* src = state.asset(id);
    require(src != nullptr, Errc::UnknownSource, id);
    require(src->owner == pr.producer, Errc::NotOwner, id + " is owned by " + src->owner);
    require(src->live(), Errc::SourceConsumed, id);
    sum += src->trust.trust;
  }
  const double trust = sum / static_cast<double>(pr.sources.size());

  Staging stage(state, tx);
  std::set<std::string_view> seen_outputs;
  for (const auto& out : pr.outputs) {
    require(!out.batch_id.empty(), Errc::MalformedTransaction, "output without batch id");
    require(seen_outputs.insert(out.batch_id).second && state.asset(out.batch_id) == nullptr &&
                !seen_sources.contains(out.batch_id),
            Errc::DuplicateBatchId, out.batch_id);
    require(state.contract(out.commodity_type) != nullptr, Errc::UnknownCommodityType, out.commodity_type);
    require_location_of(state, out.location_id, pr.producer);
    require(out.quantity > 0.0, Errc::MalformedTransaction, "quantity must be positive");

    DigitalAsset a;
    a.batch_id = out.batch_id;
    a.owner = pr.producer;
    a.commodity_type = out.commodity_type;
    a.location_id = out.location_id;
    a.quantity = out.quantity;
    a.properties = out.properties;
    for (const auto& [k, v] : pr.process_params) a.properties["process." + k] = v;
    a.source_batch_ids = pr.sources;
    a.origin = AssetOrigin::produced;
    a.trust.raw = trust;
    a.trust.trust = trust;
    a.created_at = tx.timestamp;
    stage.add_asset(std::move(a));
  }
  for (const auto& id : pr.sources) stage.edit_asset(id).consumed = true;
  stage.refresh_reputation(pr.producer);
  return stage.finish();
}

Delta handle_inspect(const WorldState& state, const Transaction& tx) {
  const auto& in = tx.as<ledger::InspectPayload>();
  const Participant* authority = state.participant(in.authority_id);
  require(authority && authority->authority && tx.signed_by(in.authority_id), Errc::NotAnAuthority,
          in.authority_id);
  require(in.rating >= 0.0 && in.rating <= 1.0, Errc::RatingOutOfRange, "rating must lie in [0, 1]");
  require(in.report_hash != crypto::kZeroDigest, Errc::MissingReportHash, "inspection " + tx.tx_id);
  const Participant* subject = state.participant(in.subject);
  require(subject && !subject->authority, Errc::UnknownSubject, in.subject);
  if (in.asset_batch_id) {
    const DigitalAsset* a = state.asset(*in.asset_batch_id);
    require(a != nullptr && a->owner == in.subject, Errc::UnknownAsset, *in.asset_batch_id);
  }

  Staging stage(state, tx);
  Participant& p = stage.edit_participant(in.subject);
  const double before = p.scores.endorsement;
  p.scores.endorsement = trm::endorsement_step(before, in.rating, state.params().gamma);
  ++p.scores.endorsements;
  stage.emit(p.id, EventKind::endorsement, before, p.scores.endorsement);
  stage.refresh_reputation(in.subject);

  Delta delta;
  Endorsement e;
  e.inspection_id = tx.tx_id;
  e.authority_id = in.authority_id;
  e.subject = in.subject;
  e.asset_batch_id = in.asset_batch_id;
  e.rating = in.rating;
  e.report_hash = in.report_hash;
  e.epoch = tx.timestamp;
  delta.endorsements.push_back(std::move(e));
  return stage.finish(std::move(delta));
}

Delta handle_trade(const WorldState& state, const Transaction& tx) {
  const auto& t = tx.as<ledger::TradePayload>();
  require(tx.signed_by(t.seller) && tx.signed_by(t.buyer), Errc::MissingCounterSignature,
          "trade needs both seller and buyer signatures");
  require(t.seller != t.buyer, Errc::SelfTrade, t.seller);
  require(tx.signatures.size() == 2, Errc::MalformedTransaction, "trade carries exactly two signatures");
  known_participant(state, t.seller);
  known_participant(state, t.buyer);
  const DigitalAsset* asset = state.asset(t.asset_batch_id);
  require(asset != nullptr, Errc::UnknownAsset, t.asset_batch_id);
  require(asset->owner == t.seller, Errc::NotOwner, t.asset_batch_id + " is owned by " + asset->owner);
  require(asset->live(), Errc::SourceConsumed, t.asset_batch_id);

  trm::TradeOutcome outcome;
  for (const auto& term : t.terms) {
    require(term.weight >= 0.0 && term.weight <= 1.0, Errc::InvalidTerm, "term " + term.term_id);
    outcome.agreements.push_back({term.weight, term_fulfilled(term, tx.timestamp)});
  }
  const double sigma = trm::trade_sigma(outcome);

  require(!t.new_batch_id.empty() && state.asset(t.new_batch_id) == nullptr, Errc::DuplicateBatchId,
          t.new_batch_id);
  require_location_of(state, t.destination_location, t.buyer);
  const double quantity = t.quantity.value_or(asset->quantity);
  require(quantity > 0.0, Errc::MalformedTransaction, "quantity must be positive");
  require(quantity <= asset->quantity, Errc::InsufficientQuantity,
          t.asset_batch_id + " holds less than requested");

  Staging stage(state, tx);
  const double gamma = state.params().gamma;
  for (const auto& party : {t.seller, t.buyer}) {
    Participant& p = stage.edit_participant(party);
    const double before = p.scores.participant_trust;
    p.scores.participant_trust = trm::participant_trust_step(before, sigma, gamma);
    ++p.scores.trades;
    stage.emit(p.id, EventKind::participant_trust, before, p.scores.participant_trust);
  }

  DigitalAsset child;
  child.batch_id = t.new_batch_id;
  child.owner = t.buyer;
  child.commodity_type = asset->commodity_type;
  child.location_id = t.destination_location;
  child.quantity = quantity;
  child.properties = asset->properties;
  child.source_batch_ids = {asset->batch_id};
  child.origin = AssetOrigin::traded;
  child.trust = asset->trust;
  child.off_chain_refs = asset->off_chain_refs;
  if (t.attachment_hash) child.off_chain_refs.push_back(*t.attachment_hash);
  child.created_at = tx.timestamp;

  DigitalAsset& parent = stage.edit_asset(t.asset_batch_id);
  if (quantity == parent.quantity) {
    parent.consumed = true;
  } else {
    parent.quantity -= quantity;
  }
  stage.add_asset(std::move(child));
  stage.refresh_reputation(t.seller);
  stage.refresh_reputation(t.buyer);
  return stage.finish();
}

Delta handle_query(const WorldState& state, const Transaction& tx) {
  const auto& q = tx.as<ledger::QueryPayload>();
  Delta delta;
  delta.response = run_query(state, q.kind, q.subject).dump();
  return delta;
}

Delta handle(const WorldState& state, const Transaction& tx) {
  require(!tx.tx_id.empty(), Errc::MalformedTransaction, "empty tx_id");
  const auto kind = tx.kind();
  if (kind != ledger::TxKind::genesis) {
    require(state.initialised(), Errc::NotInitialised, "network has no genesis yet");
  }
  Delta delta;
  switch (kind) {
    case ledger::TxKind::genesis: delta = handle_genesis(state, tx); break;
    case ledger::TxKind::join: delta = handle_join(state, tx); break;
    case ledger::TxKind::deploy: delta = handle_deploy(state, tx); break;
    case ledger::TxKind::create: delta = handle_create(state, tx); break;
    case ledger::TxKind::monitor: delta = handle_monitor(state, tx); break;
    case ledger::TxKind::produce: delta = handle_produce(state, tx); break;
    case ledger::TxKind::inspect: delta = handle_inspect(state, tx); break;
    case ledger::TxKind::trade: delta = handle_trade(state, tx); break;
    case ledger::TxKind::query: return handle_query(state, tx);
  }
  require(!state.seen_tx(tx.tx_id), Errc::DuplicateTxId, tx.tx_id);
  return delta;
}

}  // namespace detrm::contracts
