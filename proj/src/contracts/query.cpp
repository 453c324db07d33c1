#include "detrm/contracts/query.hpp"

#include <deque>
#include <set>

#include "detrm/error.hpp"

namespace detrm::contracts {

namespace {

const DigitalAsset& known_asset(const WorldState& state, std::string_view batch_id) {
  const DigitalAsset* a = state.asset(batch_id);
  if (!a) throw Error(Errc::UnknownSubject, "no asset " + std::string(batch_id));
  return *a;
}

}  // namespace

ProvenanceResponse query_provenance(const WorldState& state, std::string_view batch_id) {
  const DigitalAsset& root = known_asset(state, batch_id);
  ProvenanceResponse out;
  out.root = root.batch_id;

  std::set<std::string> visited{root.batch_id};
  std::deque<const DigitalAsset*> queue{&root};
  while (!queue.empty()) {
    const DigitalAsset* a = queue.front();
    queue.pop_front();
    out.nodes.push_back({a->batch_id, a->commodity_type, a->trust.trust, a->owner, a->origin, a->consumed});
    for (const auto& parent_id : a->source_batch_ids) {
      out.edges.push_back({a->batch_id, parent_id});
      if (!visited.insert(parent_id).second) continue;
      const DigitalAsset* parent = state.asset(parent_id);
      if (parent) queue.push_back(parent);
    }
  }
  return out;
}

TrustResponse query_trust(const WorldState& state, std::string_view batch_id) {
  const DigitalAsset& a = known_asset(state, batch_id);
  return {a.batch_id, a.trust.trust, a.trust.observations, a.owner};
}

ReputationResponse query_reputation(const WorldState& state, std::string_view participant_id) {
  const Participant* p = state.participant(participant_id);
  if (!p) throw Error(Errc::UnknownSubject, "no participant " + std::string(participant_id));
  ReputationResponse out;
  out.participant = p->id;
  out.reputation = p->scores.reputation;
  out.commodity_mean = p->scores.commodity_mean;
  out.participant_trust = p->scores.participant_trust;
  out.endorsement = p->scores.endorsement;
  out.trades = p->scores.trades;
  out.endorsements = p->scores.endorsements;
  out.assets = state.live_assets_of(p->id).size();
  return out;
}

void to_json(nlohmann::json& j, const ProvenanceResponse& r) {
  auto nodes = nlohmann::json::array();
  for (const auto& n : r.nodes) {
    nodes.push_back({{"batch_id", n.batch_id},
                     {"commodity_type", n.commodity_type},
                     {"trust", n.trust},
                     {"owner", n.owner},
                     {"origin", std::string(to_string(n.origin))},
                     {"consumed", n.consumed}});
  }
  auto edges = nlohmann::json::array();
  for (const auto& e : r.edges) edges.push_back({{"child", e.child}, {"parent", e.parent}});
  j = {{"root", r.root}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

void to_json(nlohmann::json& j, const TrustResponse& r) {
  j = {{"batch_id", r.batch_id}, {"trust", r.trust}, {"observations", r.observations}, {"owner", r.owner}};
}

void to_json(nlohmann::json& j, const ReputationResponse& r) {
  j = {{"participant", r.participant},
       {"reputation", r.reputation},
       {"components",
        {{"commodity_trust_mean", r.commodity_mean},
         {"participant_trust", r.participant_trust},
         {"endorsement", r.endorsement}}},
       {"trades", r.trades},
       {"endorsements", r.endorsements},
       {"assets", r.assets}};
}

nlohmann::json run_query(const WorldState& state, ledger::QueryKind kind, std::string_view subject) {
  switch (kind) {
    case ledger::QueryKind::provenance: return query_provenance(state, subject);
    case ledger::QueryKind::trust: return query_trust(state, subject);
    case ledger::QueryKind::reputation: return query_reputation(state, subject);
  }
  throw Error(Errc::MalformedTransaction, "unknown query kind");
}

}  // namespace detrm::contracts
