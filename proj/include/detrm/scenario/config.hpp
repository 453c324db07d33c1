#pragma once

// Scenario description as read from a JSON file. Field names follow the
// file format documented in docs/scenario-config.md.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "detrm/ledger/transaction.hpp"
#include "detrm/sensor/sensor.hpp"
#include "detrm/trm/params.hpp"

namespace detrm::scenario {

struct AuthoritySpec {
  std::string id;
  ledger::Properties properties;
};

struct ParticipantSpec {
  std::string id;
  std::vector<ledger::Role> roles;
  bool authority = false;
  std::vector<std::string> locations;
  ledger::Properties properties;
  std::string approved_by;
};

struct CommoditySpec {
  std::string type;
  double t_min = 2.0;
  double t_max = 8.0;
  std::uint64_t monitor_interval = 1;
  std::optional<double> gamma;
  std::string authority;
  std::string participant;
};

struct AssetSpec {
  std::string batch_id;
  std::string owner;
  std::string commodity;
  std::string location;
  double quantity = 1.0;
  ledger::Properties properties;
};

struct FaultSpec {
  std::size_t index = 0;  // position within the sensor group
  sensor::FaultModel model;
};

struct SensorGroupSpec {
  std::string location;
  std::size_t count = 0;
  std::string key_prefix;     // keys are <prefix><n>, n from 1
  std::string stream_prefix;  // empty means key_prefix
  std::string modality{sensor::kDefaultModality};
  std::vector<FaultSpec> faults;
};

struct TermSpec {
  std::string id;
  std::string description;
  double weight = 1.0;
  std::uint64_t deadline_offset = 0;
  std::optional<std::uint64_t> fulfilled_offset = 0;  // null: never fulfilled
};

struct InspectSpec {
  std::string authority;
  std::string subject;
  std::optional<std::string> asset;
  double rating = 1.0;
  std::string report;
};

struct TradeSpec {
  std::string asset;
  std::string seller;
  std::string buyer;
  std::string new_batch;
  std::optional<double> quantity;
  std::string destination;
  std::vector<TermSpec> terms;
  std::optional<std::string> attachment;
};

struct ProduceSpec {
  std::string producer;
  std::vector<std::string> sources;
  std::vector<AssetSpec> outputs;  // owner is ignored
  ledger::Properties process;
};

struct QuerySpec {
  ledger::QueryKind kind = ledger::QueryKind::trust;
  std::string subject;
};

enum class EventType { inspect, trade, produce, query };

/// One scheduled action. String fields may contain `{epoch}`, replaced
/// by the epoch the action fires in.
struct EventSpec {
  EventType type = EventType::inspect;
  std::vector<std::uint64_t> epochs;
  InspectSpec inspect;
  TradeSpec trade;
  ProduceSpec produce;
  QuerySpec query;
};

enum class Metric { trust, alerts, reputation, participant_trust, endorsement, commodity_mean };

std::string_view to_string(Metric m) noexcept;
std::optional<Metric> metric_from_string(std::string_view name) noexcept;
bool is_asset_metric(Metric m) noexcept;

struct TrackSpec {
  std::string subject;
  Metric metric = Metric::trust;
};

struct EnvironmentSpec {
  double base_std = 0.0;
  double confidence_lo = 0.9;
  double confidence_hi = 1.0;
  std::map<std::string, std::vector<sensor::Segment>, std::less<>> locations;
};

struct ScenarioConfig {
  std::string name;
  std::uint64_t seed = 1;
  std::uint64_t epochs = 1;
  trm::TrmParams params;
  std::vector<AuthoritySpec> authorities;
  std::vector<ParticipantSpec> participants;
  std::vector<CommoditySpec> commodities;
  std::vector<AssetSpec> assets;
  EnvironmentSpec environment;
  std::vector<SensorGroupSpec> sensors;
  std::vector<EventSpec> events;
  std::vector<TrackSpec> track;
};

/// Parses and statically validates. Throws Error(ConfigError) naming the
/// offending field path, e.g. `assets[2].owner`.
ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Cross-reference checks; parse_config already calls this.
void validate_config(const ScenarioConfig& config);

/// Replaces every `{epoch}` in `text`.
std::string expand(std::string_view text, std::uint64_t epoch);

}  // namespace detrm::scenario
