#include "detrm/scenario/config.hpp"

#include <fstream>
#include <set>

#include "detrm/error.hpp"

namespace detrm::scenario {

using nlohmann::json;

std::string_view to_string(Metric m) noexcept {
  switch (m) {
    case Metric::trust: return "trust";
    case Metric::alerts: return "alerts";
    case Metric::reputation: return "reputation";
    case Metric::participant_trust: return "participant_trust";
    case Metric::endorsement: return "endorsement";
    case Metric::commodity_mean: return "commodity_mean";
  }
  return "unknown";
}

std::optional<Metric> metric_from_string(std::string_view name) noexcept {
  for (Metric m : {Metric::trust, Metric::alerts, Metric::reputation, Metric::participant_trust,
                   Metric::endorsement, Metric::commodity_mean}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

bool is_asset_metric(Metric m) noexcept { return m == Metric::trust || m == Metric::alerts; }

std::string expand(std::string_view text, std::uint64_t epoch) {
  static constexpr std::string_view kToken = "{epoch}";
  std::string out;
  const std::string e = std::to_string(epoch);
  std::size_t pos = 0;
  while (true) {
    const auto hit = text.find(kToken, pos);
    out.append(text.substr(pos, hit - pos));
    if (hit == std::string_view::npos) break;
    out += e;
    pos = hit + kToken.size();
  }
  return out;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(Errc::ConfigError, path + ": " + what);
}

// A JSON node plus its path from the document root, for error messages.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return j_; }

  bool has(const char* key) const { return j_.is_object() && j_.contains(key) && !j_.at(key).is_null(); }

  Node at(const char* key) const {
    if (!j_.is_object()) fail(path_, "expected an object");
    if (!j_.contains(key)) fail(join(key), "required field missing");
    return {j_.at(key), join(key)};
  }

  std::vector<Node> items(const char* key) const {
    std::vector<Node> out;
    if (!has(key)) return out;
    Node arr = at(key);
    if (!arr.j_.is_array()) fail(arr.path_, "expected an array");
    for (std::size_t i = 0; i < arr.j_.size(); ++i) {
      out.emplace_back(arr.j_[i], arr.path_ + "[" + std::to_string(i) + "]");
    }
    return out;
  }

  std::string str() const {
    if (!j_.is_string()) fail(path_, "expected a string");
    return j_.get<std::string>();
  }

  std::string id() const {
    auto s = str();
    if (s.empty()) fail(path_, "empty identifier");
    return s;
  }

  double num() const {
    if (!j_.is_number()) fail(path_, "expected a number");
    return j_.get<double>();
  }

  std::uint64_t uint() const {
    if (!j_.is_number_unsigned() && !(j_.is_number_integer() && j_.get<std::int64_t>() >= 0)) {
      fail(path_, "expected a non-negative integer");
    }
    return j_.get<std::uint64_t>();
  }

  bool boolean() const {
    if (!j_.is_boolean()) fail(path_, "expected true or false");
    return j_.get<bool>();
  }

  std::string str_or(const char* key, std::string fallback) const { return has(key) ? at(key).str() : fallback; }
  double num_or(const char* key, double fallback) const { return has(key) ? at(key).num() : fallback; }
  std::uint64_t uint_or(const char* key, std::uint64_t fallback) const {
    return has(key) ? at(key).uint() : fallback;
  }
  bool bool_or(const char* key, bool fallback) const { return has(key) ? at(key).boolean() : fallback; }

  std::vector<std::string> ids(const char* key) const {
    std::vector<std::string> out;
    for (const auto& n : items(key)) out.push_back(n.id());
    return out;
  }

  ledger::Properties properties(const char* key) const {
    ledger::Properties out;
    if (!has(key)) return out;
    Node obj = at(key);
    if (!obj.j_.is_object()) fail(obj.path_, "expected an object of strings");
    for (const auto& [k, v] : obj.j_.items()) {
      if (!v.is_string()) fail(obj.path_ + "." + k, "expected a string");
      out.emplace(k, v.get<std::string>());
    }
    return out;
  }

 private:
  std::string join(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& j_;
  std::string path_;
};

trm::TrmParams parse_params(const Node& root) {
  trm::TrmParams p;
  if (!root.has("params")) return p;
  const Node n = root.at("params");
  p.gamma = n.num_or("gamma", p.gamma);
  p.delta_max = n.num_or("delta_max", p.delta_max);
  p.delta_min = n.num_or("delta_min", p.delta_min);
  p.t_min = n.num_or("t_min", p.t_min);
  p.t_max = n.num_or("t_max", p.t_max);
  p.y_min_sensors = n.uint_or("y_min_sensors", p.y_min_sensors);
  p.support_epsilon = n.num_or("support_epsilon", p.support_epsilon);
  if (n.has("weights")) {
    const Node w = n.at("weights");
    p.weights.trust = w.num_or("trust", p.weights.trust);
    p.weights.participant = w.num_or("participant", p.weights.participant);
    p.weights.endorsement = w.num_or("endorsement", p.weights.endorsement);
  }
  const auto mode = n.str_or("evidence_mode", "raw");
  if (mode == "raw") {
    p.evidence_mode = trm::EvidenceMode::raw;
  } else if (mode == "clamp_unit") {
    p.evidence_mode = trm::EvidenceMode::clamp_unit;
  } else {
    fail(n.path() + ".evidence_mode", "expected raw or clamp_unit");
  }
  try {
    p.validate();
  } catch (const Error& e) {
    fail(n.path(), e.what());
  }
  return p;
}

AssetSpec parse_asset(const Node& n, bool need_owner) {
  AssetSpec a;
  a.batch_id = n.at("batch_id").id();
  if (need_owner) a.owner = n.at("owner").id();
  a.commodity = n.at("commodity").id();
  a.location = n.at("location").id();
  a.quantity = n.num_or("quantity", 1.0);
  a.properties = n.properties("properties");
  return a;
}

std::vector<std::uint64_t> parse_schedule(const Node& n) {
  std::vector<std::uint64_t> out;
  if (n.has("epoch")) out.push_back(n.at("epoch").uint());
  for (const auto& e : n.items("epochs")) out.push_back(e.uint());
  if (n.has("repeat")) {
    const Node r = n.at("repeat");
    const auto every = r.at("every").uint();
    if (every == 0) fail(r.path() + ".every", "must be at least 1");
    const auto from = r.at("from").uint();
    const auto to = r.at("to").uint();
    if (to < from) fail(r.path() + ".to", "ends before it starts");
    for (auto e = from; e <= to; e += every) out.push_back(e);
  }
  if (out.empty()) fail(n.path(), "needs epoch, epochs or repeat");
  return out;
}

EventSpec parse_event(const Node& n) {
  EventSpec ev;
  ev.epochs = parse_schedule(n);
  const auto type = n.at("type").str();
  if (type == "inspect") {
    ev.type = EventType::inspect;
    auto& in = ev.inspect;
    in.authority = n.at("authority").id();
    in.subject = n.at("subject").id();
    if (n.has("asset")) in.asset = n.at("asset").id();
    in.rating = n.num_or("rating", 1.0);
    in.report = n.str_or("report", "inspection report");
  } else if (type == "trade") {
    ev.type = EventType::trade;
    auto& t = ev.trade;
    t.asset = n.at("asset").id();
    t.seller = n.at("seller").id();
    t.buyer = n.at("buyer").id();
    t.new_batch = n.at("new_batch").id();
    if (n.has("quantity")) t.quantity = n.at("quantity").num();
    t.destination = n.at("destination").id();
    for (const auto& tn : n.items("terms")) {
      TermSpec term;
      term.id = tn.at("id").id();
      term.description = tn.str_or("description", "");
      term.weight = tn.num_or("weight", 1.0);
      term.deadline_offset = tn.uint_or("deadline_offset", 0);
      if (tn.raw().contains("fulfilled_offset") && tn.raw().at("fulfilled_offset").is_null()) {
        term.fulfilled_offset.reset();
      } else {
        term.fulfilled_offset = tn.uint_or("fulfilled_offset", 0);
      }
      t.terms.push_back(std::move(term));
    }
    if (n.has("attachment")) t.attachment = n.at("attachment").str();
  } else if (type == "produce") {
    ev.type = EventType::produce;
    auto& p = ev.produce;
    p.producer = n.at("producer").id();
    p.sources = n.ids("sources");
    for (const auto& o : n.items("outputs")) p.outputs.push_back(parse_asset(o, false));
    p.process = n.properties("process");
  } else if (type == "query") {
    ev.type = EventType::query;
    const auto kind = ledger::query_kind_from_string(n.at("kind").str());
    if (!kind) fail(n.path() + ".kind", "expected provenance, trust or reputation");
    ev.query.kind = *kind;
    ev.query.subject = n.at("subject").id();
  } else {
    fail(n.path() + ".type", "unknown event type '" + type + "'");
  }
  return ev;
}

}  // namespace

ScenarioConfig parse_config(const json& doc) {
  const Node root(doc, "");
  if (!doc.is_object()) fail("<root>", "expected an object");
  ScenarioConfig c;
  c.name = root.str_or("name", "scenario");
  c.seed = root.uint_or("seed", 1);
  c.epochs = root.at("epochs").uint();
  c.params = parse_params(root);

  for (const auto& n : root.items("authorities")) {
    c.authorities.push_back({n.at("id").id(), n.properties("properties")});
  }
  for (const auto& n : root.items("participants")) {
    ParticipantSpec p;
    p.id = n.at("id").id();
    for (const auto& r : n.items("roles")) {
      const auto role = ledger::role_from_string(r.str());
      if (!role) fail(r.path(), "expected producer, distributor or retailer");
      p.roles.push_back(*role);
    }
    p.authority = n.bool_or("authority", false);
    p.locations = n.ids("locations");
    p.properties = n.properties("properties");
    p.approved_by = n.at("approved_by").id();
    c.participants.push_back(std::move(p));
  }
  for (const auto& n : root.items("commodities")) {
    CommoditySpec s;
    s.type = n.at("type").id();
    s.t_min = n.num_or("t_min", c.params.t_min);
    s.t_max = n.num_or("t_max", c.params.t_max);
    s.monitor_interval = n.uint_or("monitor_interval", 1);
    if (n.has("gamma")) s.gamma = n.at("gamma").num();
    s.authority = n.at("authority").id();
    s.participant = n.at("participant").id();
    c.commodities.push_back(std::move(s));
  }
  for (const auto& n : root.items("assets")) c.assets.push_back(parse_asset(n, true));

  if (root.has("environment")) {
    const Node env = root.at("environment");
    c.environment.base_std = env.num_or("base_std", 0.0);
    if (env.has("confidence")) {
      const auto range = env.items("confidence");
      if (range.size() != 2) fail(env.path() + ".confidence", "expected [lo, hi]");
      c.environment.confidence_lo = range[0].num();
      c.environment.confidence_hi = range[1].num();
    }
    if (env.has("locations")) {
      const Node locs = env.at("locations");
      if (!locs.raw().is_object()) fail(locs.path(), "expected an object");
      for (const auto& [loc, _] : locs.raw().items()) {
        std::vector<sensor::Segment> segments;
        for (const auto& s : locs.items(loc.c_str())) {
          segments.push_back({s.at("from").uint(), s.at("celsius").num()});
        }
        c.environment.locations.emplace(loc, std::move(segments));
      }
    }
  }

  for (const auto& n : root.items("sensors")) {
    SensorGroupSpec g;
    g.location = n.at("location").id();
    g.count = n.at("count").uint();
    g.key_prefix = n.str_or("key_prefix", g.location + "/s");
    g.stream_prefix = n.str_or("stream_prefix", "");
    g.modality = n.str_or("modality", std::string(sensor::kDefaultModality));
    for (const auto& f : n.items("faults")) {
      FaultSpec fs;
      fs.index = f.at("index").uint();
      const auto kind = sensor::fault_kind_from_string(f.at("kind").str());
      if (!kind) fail(f.path() + ".kind", "expected stuck_at, offset or noisy");
      fs.model.kind = *kind;
      fs.model.param = f.num_or("param", 15.0);
      fs.model.start_epoch = f.uint_or("start_epoch", 0);
      fs.model.confidence_penalty = f.num_or("confidence_penalty", 0.5);
      g.faults.push_back(fs);
    }
    c.sensors.push_back(std::move(g));
  }
  for (const auto& n : root.items("events")) c.events.push_back(parse_event(n));
  for (const auto& n : root.items("track")) {
    TrackSpec t;
    t.subject = n.at("subject").id();
    const auto metric = metric_from_string(n.at("metric").str());
    if (!metric) fail(n.path() + ".metric", "unknown metric");
    t.metric = *metric;
    c.track.push_back(std::move(t));
  }
  validate_config(c);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoFailure, "cannot read " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ConfigError, path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

void validate_config(const ScenarioConfig& c) {
  auto idx = [](const char* list, std::size_t i, const char* field) {
    return std::string(list) + "[" + std::to_string(i) + "]." + field;
  };
  if (c.epochs < 1) fail("epochs", "must be at least 1");
  if (!c.participants.empty() && c.authorities.empty()) fail("authorities", "participants need an approving authority");

  std::set<std::string> authorities, participants, members, locations, commodities, batches;
  for (std::size_t i = 0; i < c.authorities.size(); ++i) {
    if (!authorities.insert(c.authorities[i].id).second) fail(idx("authorities", i, "id"), "duplicate id");
    members.insert(c.authorities[i].id);
  }
  for (std::size_t i = 0; i < c.participants.size(); ++i) {
    const auto& p = c.participants[i];
    if (!members.insert(p.id).second) fail(idx("participants", i, "id"), "duplicate id");
    if (!authorities.contains(p.approved_by)) fail(idx("participants", i, "approved_by"), "not an authority");
    if (p.roles.empty() && !p.authority) fail(idx("participants", i, "roles"), "needs at least one role");
    if (p.authority) authorities.insert(p.id);
    participants.insert(p.id);
    for (const auto& l : p.locations) {
      if (!locations.insert(l).second) fail(idx("participants", i, "locations"), "location " + l + " reused");
    }
  }
  for (std::size_t i = 0; i < c.commodities.size(); ++i) {
    const auto& s = c.commodities[i];
    if (!commodities.insert(s.type).second) fail(idx("commodities", i, "type"), "duplicate commodity");
    if (!(s.t_min < s.t_max)) fail(idx("commodities", i, "t_max"), "must exceed t_min");
    if (s.monitor_interval < 1) fail(idx("commodities", i, "monitor_interval"), "must be at least 1");
    if (s.gamma && !(*s.gamma > 0.0 && *s.gamma <= 1.0)) fail(idx("commodities", i, "gamma"), "must lie in (0, 1]");
    if (!authorities.contains(s.authority)) fail(idx("commodities", i, "authority"), "not an authority");
    if (!members.contains(s.participant)) fail(idx("commodities", i, "participant"), "unknown participant");
  }
  for (std::size_t i = 0; i < c.assets.size(); ++i) {
    const auto& a = c.assets[i];
    if (!batches.insert(a.batch_id).second) fail(idx("assets", i, "batch_id"), "duplicate batch id");
    if (!participants.contains(a.owner)) fail(idx("assets", i, "owner"), "unknown participant");
    if (!commodities.contains(a.commodity)) fail(idx("assets", i, "commodity"), "no contract for this commodity");
    if (!locations.contains(a.location)) fail(idx("assets", i, "location"), "unknown location");
  }

  const auto& env = c.environment;
  if (!(env.confidence_lo >= 0.0 && env.confidence_lo <= env.confidence_hi && env.confidence_hi <= 1.0)) {
    fail("environment.confidence", "expected 0 <= lo <= hi <= 1");
  }
  if (!(env.base_std >= 0.0)) fail("environment.base_std", "must be non-negative");
  for (const auto& [loc, segments] : env.locations) {
    const std::string path = "environment.locations." + loc;
    if (segments.empty() || segments.front().from > 1) fail(path, "trajectory must start by epoch 1");
    for (std::size_t k = 1; k < segments.size(); ++k) {
      if (segments[k].from <= segments[k - 1].from) fail(path, "segments must be sorted by 'from'");
    }
  }
  std::set<std::string> sensed;
  for (std::size_t i = 0; i < c.sensors.size(); ++i) {
    const auto& g = c.sensors[i];
    if (!locations.contains(g.location)) fail(idx("sensors", i, "location"), "unknown location");
    if (!sensed.insert(g.location).second) fail(idx("sensors", i, "location"), "one sensor group per location");
    if (!env.locations.contains(g.location)) fail(idx("sensors", i, "location"), "no environment trajectory");
    if (g.count < c.params.y_min_sensors) {
      fail(idx("sensors", i, "count"), "below y_min_sensors=" + std::to_string(c.params.y_min_sensors));
    }
    for (std::size_t k = 0; k < g.faults.size(); ++k) {
      const auto& f = g.faults[k];
      const std::string path = idx("sensors", i, "faults") + "[" + std::to_string(k) + "]";
      if (f.index >= g.count) fail(path + ".index", "outside the group");
      if (!(f.model.confidence_penalty >= 0.0 && f.model.confidence_penalty <= 1.0)) {
        fail(path + ".confidence_penalty", "must lie in [0, 1]");
      }
    }
  }

  for (std::size_t i = 0; i < c.events.size(); ++i) {
    const auto& ev = c.events[i];
    for (auto e : ev.epochs) {
      if (e < 1 || e > c.epochs) fail(idx("events", i, "epoch"), "outside 1.." + std::to_string(c.epochs));
    }
    switch (ev.type) {
      case EventType::inspect:
        if (!members.contains(ev.inspect.authority)) fail(idx("events", i, "authority"), "unknown member");
        if (!members.contains(ev.inspect.subject)) fail(idx("events", i, "subject"), "unknown member");
        break;
      case EventType::trade:
        if (!members.contains(ev.trade.seller)) fail(idx("events", i, "seller"), "unknown member");
        if (!members.contains(ev.trade.buyer)) fail(idx("events", i, "buyer"), "unknown member");
        if (!locations.contains(ev.trade.destination)) fail(idx("events", i, "destination"), "unknown location");
        if (ev.trade.terms.empty()) fail(idx("events", i, "terms"), "needs at least one term");
        if (ev.trade.new_batch.find("{epoch}") == std::string::npos) batches.insert(ev.trade.new_batch);
        break;
      case EventType::produce:
        if (!members.contains(ev.produce.producer)) fail(idx("events", i, "producer"), "unknown member");
        if (ev.produce.sources.empty()) fail(idx("events", i, "sources"), "needs at least one source");
        if (ev.produce.outputs.empty()) fail(idx("events", i, "outputs"), "needs at least one output");
        for (const auto& o : ev.produce.outputs) {
          if (!commodities.contains(o.commodity)) fail(idx("events", i, "outputs"), "unknown commodity " + o.commodity);
          if (!locations.contains(o.location)) fail(idx("events", i, "outputs"), "unknown location " + o.location);
          if (o.batch_id.find("{epoch}") == std::string::npos) batches.insert(o.batch_id);
        }
        break;
      case EventType::query:
        break;
    }
  }
  for (std::size_t i = 0; i < c.track.size(); ++i) {
    const auto& t = c.track[i];
    if (is_asset_metric(t.metric)) {
      if (!batches.contains(t.subject)) fail(idx("track", i, "subject"), "unknown batch " + t.subject);
    } else if (!participants.contains(t.subject)) {
      fail(idx("track", i, "subject"), "unknown participant " + t.subject);
    }
  }
}

}  // namespace detrm::scenario
