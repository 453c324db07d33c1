#include "detrm/scenario/runner.hpp"

#include <algorithm>
#include <limits>

#include "detrm/contracts/supply_chain.hpp"
#include "detrm/sensor/sensor.hpp"

namespace detrm::scenario {

using ledger::Transaction;

const crypto::KeyPair& Keyring::key(const std::string& member) {
  auto it = keys_.find(member);
  if (it == keys_.end()) {
    it = keys_.emplace(member, crypto::KeyPair::derive("scenario/" + std::to_string(seed_) + "/" + member)).first;
  }
  return it->second;
}

Transaction Keyring::sign(Transaction tx, std::initializer_list<std::string> signers) {
  for (const auto& s : signers) tx = ledger::sign_tx(std::move(tx), s, key(s));
  return tx;
}

const contracts::WorldState& ScenarioResult::state() const { return contracts::supply_chain(*ledger).state(); }

namespace {

// Outlives the run: the ledger keeps the sink after the result is returned.
struct EventLog {
  std::vector<ledger::Event> events;
  std::map<std::string, std::size_t> alerts_by_batch;
};

struct SensorGroup {
  std::string location;
  std::vector<sensor::SensorNode> nodes;
};

class Run {
 public:
  Run(const ScenarioConfig& config, std::optional<std::filesystem::path> offchain_dir)
      : config_(config), keys_(config.seed) {
    result_.name = config.name;
    result_.seed = config.seed;
    result_.epochs = config.epochs;
    result_.ledger = std::make_unique<ledger::Ledger>(contracts::supply_chain_factory());
    result_.store = offchain_dir ? std::make_unique<ledger::OffChainStore>(*offchain_dir)
                                 : std::make_unique<ledger::OffChainStore>();
    result_.ledger->subscribe([log = log_](const ledger::Event& ev) {
      if (ev.kind == ledger::EventKind::alert) ++log->alerts_by_batch[ev.subject];
      log->events.push_back(ev);
    });
  }

  ScenarioResult finish() && {
    bootstrap();
    record(0);
    for (std::uint64_t e = 1; e <= config_.epochs; ++e) {
      monitor(e);
      for (std::size_t i = 0; i < config_.events.size(); ++i) {
        const auto& ev = config_.events[i];
        if (std::find(ev.epochs.begin(), ev.epochs.end(), e) != ev.epochs.end()) fire(ev, i, e);
      }
      if (result_.ledger->pending_count() > 0) result_.ledger->seal_block();
      record(e);
    }
    result_.events = std::move(log_->events);
    log_->events.clear();
    return std::move(result_);
  }

 private:
  const contracts::WorldState& state() const { return contracts::supply_chain(*result_.ledger).state(); }

  void setup(Transaction tx, const std::string& path) {
    const auto receipt = result_.ledger->submit(std::move(tx));
    if (!receipt.accepted()) throw Error(Errc::ConfigError, path + ": rejected by the network: " + receipt.message);
    ++result_.accepted;
  }

  void bootstrap() {
    if (config_.authorities.empty() && config_.participants.empty()) {
      // Nothing to govern: the chain still gets a genesis with default
      // parameters and a single bootstrap authority.
      ledger::GenesisPayload g{config_.params, {{"bootstrap", {}, keys_.key("bootstrap").public_key()}}};
      setup(keys_.sign({"genesis", 0, g, {}}, {"bootstrap"}), "genesis");
      result_.ledger->seal_block();
      return;
    }

    ledger::GenesisPayload g;
    g.params = config_.params;
    for (const auto& a : config_.authorities) g.authorities.push_back({a.id, a.properties, keys_.key(a.id).public_key()});
    Transaction genesis{"genesis", 0, g, {}};
    for (const auto& a : config_.authorities) genesis = ledger::sign_tx(std::move(genesis), a.id, keys_.key(a.id));
    setup(std::move(genesis), "authorities");

    for (std::size_t i = 0; i < config_.participants.size(); ++i) {
      const auto& p = config_.participants[i];
      ledger::JoinPayload j{p.id, p.roles, p.authority, p.properties, p.locations, keys_.key(p.id).public_key()};
      setup(keys_.sign({"join/" + p.id, 0, j, {}}, {p.approved_by}), "participants[" + std::to_string(i) + "]");
    }
    for (std::size_t i = 0; i < config_.commodities.size(); ++i) {
      const auto& c = config_.commodities[i];
      ledger::DeployPayload d{c.type, c.t_min, c.t_max, c.monitor_interval, c.gamma, c.authority, c.participant};
      setup(keys_.sign({"contract/" + c.type, 0, d, {}}, {c.authority, c.participant}),
            "commodities[" + std::to_string(i) + "]");
    }
    for (std::size_t i = 0; i < config_.assets.size(); ++i) {
      const auto& a = config_.assets[i];
      ledger::CreatePayload c{a.owner, a.commodity, a.location, a.quantity, a.properties};
      setup(keys_.sign({a.batch_id, 0, c, {}}, {a.owner}), "assets[" + std::to_string(i) + "]");
    }
    result_.ledger->seal_block();

    env_.horizon = config_.epochs;
    env_.base_std = config_.environment.base_std;
    env_.confidence_lo = config_.environment.confidence_lo;
    env_.confidence_hi = config_.environment.confidence_hi;
    for (const auto& [loc, segments] : config_.environment.locations) env_.locations[loc].segments = segments;

    for (const auto& g : config_.sensors) {
      SensorGroup group;
      group.location = g.location;
      const auto owner = state().location_owner(g.location).value_or("");
      const std::string& stream = g.stream_prefix.empty() ? g.key_prefix : g.stream_prefix;
      for (std::size_t n = 0; n < g.count; ++n) {
        sensor::SensorNode node;
        node.key = g.key_prefix + std::to_string(n + 1);
        node.modality = g.modality;
        node.owner = owner;
        node.location_id = g.location;
        node.stream = stream + std::to_string(n + 1);
        for (const auto& f : g.faults) {
          if (f.index == n) node.fault = f.model;
        }
        group.nodes.push_back(std::move(node));
      }
      groups_.push_back(std::move(group));
    }
  }

  void submit(Transaction tx, std::uint64_t epoch) {
    const auto id = tx.tx_id;
    const auto kind = tx.kind();
    const auto receipt = result_.ledger->submit(std::move(tx));
    if (receipt.accepted()) {
      ++result_.accepted;
      return;
    }
    result_.rejections.push_back({epoch, id, kind, receipt.error.value_or(Errc::HandlerRejection), receipt.cause,
                                  receipt.message});
  }

  void monitor(std::uint64_t epoch) {
    const auto& st = state();
    for (const auto& g : groups_) {
      std::uint64_t interval = std::numeric_limits<std::uint64_t>::max();
      for (const auto& id : st.live_assets_at(g.location)) {
        if (const auto* c = st.contract(st.asset(id)->commodity_type)) interval = std::min(interval, c->monitor_interval);
      }
      if (interval == std::numeric_limits<std::uint64_t>::max() || epoch % interval != 0) continue;
      const auto owner = st.location_owner(g.location).value_or("");
      ledger::MonitorPayload m;
      m.gateway_id = "gateway/" + g.location;
      m.location_id = g.location;
      m.readings = sensor::gateway_collect(g.location, g.nodes, env_, epoch, config_.seed,
                                           config_.params.y_min_sensors);
      submit(keys_.sign({"monitor/" + g.location + "/" + std::to_string(epoch), epoch, std::move(m), {}}, {owner}),
             epoch);
    }
  }

  void fire(const EventSpec& ev, std::size_t index, std::uint64_t e) {
    const std::string tag = std::to_string(index) + "/" + std::to_string(e);
    switch (ev.type) {
      case EventType::inspect: {
        const auto& s = ev.inspect;
        ledger::InspectPayload p;
        p.authority_id = s.authority;
        p.subject = s.subject;
        if (s.asset) p.asset_batch_id = expand(*s.asset, e);
        p.rating = s.rating;
        p.report_hash = result_.store->put(expand(s.report, e));
        submit(keys_.sign({"inspect/" + tag, e, std::move(p), {}}, {s.authority}), e);
        break;
      }
      case EventType::trade: {
        const auto& s = ev.trade;
        ledger::TradePayload p;
        p.asset_batch_id = expand(s.asset, e);
        p.seller = s.seller;
        p.buyer = s.buyer;
        p.new_batch_id = expand(s.new_batch, e);
        p.quantity = s.quantity;
        p.destination_location = s.destination;
        for (const auto& t : s.terms) {
          ledger::TradeTerm term;
          term.term_id = t.id;
          term.description = t.description;
          term.weight = t.weight;
          term.deadline = e + t.deadline_offset;
          if (t.fulfilled_offset) term.fulfilled_at = e + *t.fulfilled_offset;
          p.terms.push_back(std::move(term));
        }
        if (s.attachment) p.attachment_hash = result_.store->put(expand(*s.attachment, e));
        const std::string id = "trade/" + p.new_batch_id;
        submit(keys_.sign({id, e, std::move(p), {}}, {s.seller, s.buyer}), e);
        break;
      }
      case EventType::produce: {
        const auto& s = ev.produce;
        ledger::ProducePayload p;
        p.producer = s.producer;
        for (const auto& src : s.sources) p.sources.push_back(expand(src, e));
        for (const auto& o : s.outputs) {
          p.outputs.push_back({expand(o.batch_id, e), o.commodity, o.location, o.quantity, o.properties});
        }
        p.process_params = s.process;
        const std::string id = p.outputs.front().batch_id;
        submit(keys_.sign({id, e, std::move(p), {}}, {s.producer}), e);
        break;
      }
      case EventType::query: {
        ledger::QueryPayload p{ev.query.kind, expand(ev.query.subject, e)};
        submit({"query/" + tag, e, std::move(p), {}}, e);
        break;
      }
    }
  }

  void record(std::uint64_t epoch) {
    const auto& st = state();
    for (const auto& t : config_.track) {
      const auto metric = std::string(to_string(t.metric));
      if (is_asset_metric(t.metric)) {
        const auto* a = st.asset(t.subject);
        if (!a) continue;
        double value = a->trust.trust;
        if (t.metric == Metric::alerts) {
          auto it = log_->alerts_by_batch.find(t.subject);
          value = it == log_->alerts_by_batch.end() ? 0.0 : static_cast<double>(it->second);
        }
        result_.series.rows.push_back({epoch, t.subject, metric, value});
        continue;
      }
      const auto* p = st.participant(t.subject);
      if (!p) continue;
      double value = 0.0;
      switch (t.metric) {
        case Metric::reputation: value = p->scores.reputation; break;
        case Metric::participant_trust: value = p->scores.participant_trust; break;
        case Metric::endorsement: value = p->scores.endorsement; break;
        case Metric::commodity_mean: value = p->scores.commodity_mean; break;
        default: break;
      }
      result_.series.rows.push_back({epoch, t.subject, metric, value});
    }
  }

  const ScenarioConfig& config_;
  Keyring keys_;
  sensor::Environment env_;
  std::vector<SensorGroup> groups_;
  std::shared_ptr<EventLog> log_ = std::make_shared<EventLog>();
  ScenarioResult result_;
};

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& config, std::optional<std::filesystem::path> offchain_dir) {
  validate_config(config);
  return Run(config, std::move(offchain_dir)).finish();
}

nlohmann::json summarize(const ScenarioResult& result) {
  const auto& st = result.state();
  auto rejections = nlohmann::json::array();
  for (const auto& r : result.rejections) {
    nlohmann::json j = {{"epoch", r.epoch},
                        {"tx_id", r.tx_id},
                        {"kind", std::string(ledger::to_string(r.kind))},
                        {"error", std::string(to_string(r.error))},
                        {"message", r.message}};
    if (r.cause) j["cause"] = std::string(to_string(*r.cause));
    rejections.push_back(std::move(j));
  }
  auto participants = nlohmann::json::object();
  for (const auto& [id, p] : st.participants()) {
    participants[id] = {{"reputation", p.scores.reputation},
                        {"participant_trust", p.scores.participant_trust},
                        {"endorsement", p.scores.endorsement},
                        {"commodity_mean", p.scores.commodity_mean},
                        {"trades", p.scores.trades},
                        {"endorsements", p.scores.endorsements}};
  }
  const auto head = result.ledger->block(result.ledger->height() - 1);
  return {{"name", result.name},
          {"seed", result.seed},
          {"epochs", result.epochs},
          {"blocks", result.ledger->height()},
          {"accepted_transactions", result.accepted},
          {"rejected_transactions", std::move(rejections)},
          {"alerts", st.alerts().size()},
          {"state_root", crypto::to_hex(result.ledger->state_root())},
          {"head_hash", head ? crypto::to_hex(head->block_hash) : std::string()},
          {"participants", std::move(participants)}};
}

}  // namespace detrm::scenario
