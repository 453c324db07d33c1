#pragma once

// Read-only views over the world state, shared by the query transaction
// and the HTTP service.

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "detrm/contracts/world_state.hpp"

namespace detrm::contracts {

struct ProvenanceNode {
  std::string batch_id;
  std::string commodity_type;
  double trust = 0.0;
  std::string owner;
  AssetOrigin origin = AssetOrigin::created;
  bool consumed = false;
};

struct ProvenanceEdge {
  std::string child;
  std::string parent;
};

/// Ancestry of `root` through source links, breadth first. Nodes are
/// listed once each, root first.
struct ProvenanceResponse {
  std::string root;
  std::vector<ProvenanceNode> nodes;
  std::vector<ProvenanceEdge> edges;
};

struct TrustResponse {
  std::string batch_id;
  double trust = 0.0;
  std::uint64_t observations = 0;
  std::string owner;
};

struct ReputationResponse {
  std::string participant;
  double reputation = 0.0;
  double commodity_mean = 0.0;
  double participant_trust = 0.0;
  double endorsement = 0.0;
  std::uint64_t trades = 0;
  std::uint64_t endorsements = 0;
  std::size_t assets = 0;
};

/// All three throw Error(UnknownSubject).
ProvenanceResponse query_provenance(const WorldState& state, std::string_view batch_id);
TrustResponse query_trust(const WorldState& state, std::string_view batch_id);
ReputationResponse query_reputation(const WorldState& state, std::string_view participant_id);

void to_json(nlohmann::json& j, const ProvenanceResponse& r);
void to_json(nlohmann::json& j, const TrustResponse& r);
void to_json(nlohmann::json& j, const ReputationResponse& r);

nlohmann::json run_query(const WorldState& state, ledger::QueryKind kind, std::string_view subject);

}  // namespace detrm::contracts
