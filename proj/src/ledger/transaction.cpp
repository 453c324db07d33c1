#include "detrm/ledger/transaction.hpp"

#include <algorithm>

namespace detrm::ledger {

std::string_view to_string(Role role) noexcept {
  switch (role) {
    case Role::producer: return "producer";
    case Role::distributor: return "distributor";
    case Role::retailer: return "retailer";
  }
  return "unknown";
}

std::optional<Role> role_from_string(std::string_view name) noexcept {
  if (name == "producer") return Role::producer;
  if (name == "distributor") return Role::distributor;
  if (name == "retailer") return Role::retailer;
  return std::nullopt;
}

std::string_view to_string(QueryKind kind) noexcept {
  switch (kind) {
    case QueryKind::provenance: return "provenance";
    case QueryKind::trust: return "trust";
    case QueryKind::reputation: return "reputation";
  }
  return "unknown";
}

std::optional<QueryKind> query_kind_from_string(std::string_view name) noexcept {
  if (name == "provenance") return QueryKind::provenance;
  if (name == "trust") return QueryKind::trust;
  if (name == "reputation") return QueryKind::reputation;
  return std::nullopt;
}

std::string_view to_string(TxKind kind) noexcept {
  switch (kind) {
    case TxKind::genesis: return "genesis";
    case TxKind::join: return "join";
    case TxKind::deploy: return "deploy";
    case TxKind::create: return "create";
    case TxKind::monitor: return "monitor";
    case TxKind::produce: return "produce";
    case TxKind::inspect: return "inspect";
    case TxKind::trade: return "trade";
    case TxKind::query: return "query";
  }
  return "unknown";
}

bool Transaction::signed_by(std::string_view signer) const noexcept {
  return std::any_of(signatures.begin(), signatures.end(),
                     [&](const Signature& s) { return s.signer == signer; });
}

namespace {

using codec::Reader;
using codec::Writer;

void put(Writer& w, const Properties& props) {
  w.u32(static_cast<std::uint32_t>(props.size()));
  for (const auto& [k, v] : props) {
    w.str(k);
    w.str(v);
  }
}

Properties get_properties(Reader& r) {
  Properties props;
  const auto n = r.count();
  for (std::uint32_t i = 0; i < n; ++i) {
    auto k = r.str();
    auto v = r.str();
    if (!props.emplace(std::move(k), std::move(v)).second) {
      throw Error(Errc::MalformedTransaction, "duplicate property key");
    }
  }
  return props;
}

void put(Writer& w, const std::vector<std::string>& items) {
  w.u32(static_cast<std::uint32_t>(items.size()));
  for (const auto& s : items) w.str(s);
}

std::vector<std::string> get_strings(Reader& r) {
  std::vector<std::string> out;
  const auto n = r.count();
  out.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) out.push_back(r.str());
  return out;
}

void put_opt(Writer& w, const std::optional<double>& v) {
  w.boolean(v.has_value());
  if (v) w.f64(*v);
}

void put_opt(Writer& w, const std::optional<std::uint64_t>& v) {
  w.boolean(v.has_value());
  if (v) w.u64(*v);
}

void put_opt(Writer& w, const std::optional<std::string>& v) {
  w.boolean(v.has_value());
  if (v) w.str(*v);
}

void put_opt(Writer& w, const std::optional<crypto::Digest>& v) {
  w.boolean(v.has_value());
  if (v) w.fixed(*v);
}

void put(Writer& w, const trm::TrmParams& p) {
  w.f64(p.gamma);
  w.f64(p.delta_max);
  w.f64(p.delta_min);
  w.f64(p.t_min);
  w.f64(p.t_max);
  w.f64(p.weights.trust);
  w.f64(p.weights.participant);
  w.f64(p.weights.endorsement);
  w.u64(p.y_min_sensors);
  w.f64(p.support_epsilon);
  w.u8(static_cast<std::uint8_t>(p.evidence_mode));
}

trm::TrmParams get_params(Reader& r) {
  trm::TrmParams p;
  p.gamma = r.f64();
  p.delta_max = r.f64();
  p.delta_min = r.f64();
  p.t_min = r.f64();
  p.t_max = r.f64();
  p.weights.trust = r.f64();
  p.weights.participant = r.f64();
  p.weights.endorsement = r.f64();
  p.y_min_sensors = r.u64();
  p.support_epsilon = r.f64();
  const auto mode = r.u8();
  if (mode > 1) throw Error(Errc::MalformedTransaction, "unknown evidence mode");
  p.evidence_mode = static_cast<trm::EvidenceMode>(mode);
  return p;
}

void encode_payload(Writer& w, const GenesisPayload& p) {
  put(w, p.params);
  w.u32(static_cast<std::uint32_t>(p.authorities.size()));
  for (const auto& a : p.authorities) {
    w.str(a.id);
    put(w, a.properties);
    w.fixed(a.public_key);
  }
}

void encode_payload(Writer& w, const JoinPayload& p) {
  w.str(p.participant_id);
  w.u32(static_cast<std::uint32_t>(p.roles.size()));
  for (Role role : p.roles) w.u8(static_cast<std::uint8_t>(role));
  w.boolean(p.authority);
  put(w, p.properties);
  put(w, p.locations);
  w.fixed(p.public_key);
}

void encode_payload(Writer& w, const DeployPayload& p) {
  w.str(p.commodity_type);
  w.f64(p.t_min);
  w.f64(p.t_max);
  w.u64(p.monitor_interval);
  put_opt(w, p.gamma);
  w.str(p.authority_id);
  w.str(p.participant_id);
}

void encode_payload(Writer& w, const CreatePayload& p) {
  w.str(p.owner);
  w.str(p.commodity_type);
  w.str(p.location_id);
  w.f64(p.quantity);
  put(w, p.properties);
}

void encode_payload(Writer& w, const MonitorPayload& p) {
  w.str(p.gateway_id);
  w.str(p.location_id);
  w.u32(static_cast<std::uint32_t>(p.readings.size()));
  for (const auto& o : p.readings) {
    w.str(o.sensor_id);
    w.f64(o.value);
    w.f64(o.confidence);
    w.u64(o.epoch);
    w.str(o.location_id);
  }
}

void encode_payload(Writer& w, const ProducePayload& p) {
  w.str(p.producer);
  put(w, p.sources);
  w.u32(static_cast<std::uint32_t>(p.outputs.size()));
  for (const auto& lot : p.outputs) {
    w.str(lot.batch_id);
    w.str(lot.commodity_type);
    w.str(lot.location_id);
    w.f64(lot.quantity);
    put(w, lot.properties);
  }
  put(w, p.process_params);
}

void encode_payload(Writer& w, const InspectPayload& p) {
  w.str(p.authority_id);
  w.str(p.subject);
  put_opt(w, p.asset_batch_id);
  w.f64(p.rating);
  w.fixed(p.report_hash);
}

void encode_payload(Writer& w, const TradePayload& p) {
  w.str(p.asset_batch_id);
  w.str(p.seller);
  w.str(p.buyer);
  w.str(p.new_batch_id);
  put_opt(w, p.quantity);
  w.str(p.destination_location);
  w.u32(static_cast<std::uint32_t>(p.terms.size()));
  for (const auto& t : p.terms) {
    w.str(t.term_id);
    w.str(t.description);
    w.f64(t.weight);
    w.u64(t.deadline);
    put_opt(w, t.fulfilled_at);
  }
  put_opt(w, p.attachment_hash);
}

void encode_payload(Writer& w, const QueryPayload& p) {
  w.u8(static_cast<std::uint8_t>(p.kind));
  w.str(p.subject);
}

GenesisPayload decode_genesis(Reader& r) {
  GenesisPayload p;
  p.params = get_params(r);
  const auto n = r.count();
  for (std::uint32_t i = 0; i < n; ++i) {
    GenesisAuthority a;
    a.id = r.str();
    a.properties = get_properties(r);
    a.public_key = r.fixed<32>();
    p.authorities.push_back(std::move(a));
  }
  return p;
}

JoinPayload decode_join(Reader& r) {
  JoinPayload p;
  p.participant_id = r.str();
  const auto n = r.count();
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto role = r.u8();
    if (role > 2) throw Error(Errc::MalformedTransaction, "unknown role");
    p.roles.push_back(static_cast<Role>(role));
  }
  p.authority = r.boolean();
  p.properties = get_properties(r);
  p.locations = get_strings(r);
  p.public_key = r.fixed<32>();
  return p;
}

std::optional<double> get_opt_f64(Reader& r) {
  if (r.boolean()) return r.f64();
  return std::nullopt;
}

std::optional<std::uint64_t> get_opt_u64(Reader& r) {
  if (r.boolean()) return r.u64();
  return std::nullopt;
}

DeployPayload decode_deploy(Reader& r) {
  DeployPayload p;
  p.commodity_type = r.str();
  p.t_min = r.f64();
  p.t_max = r.f64();
  p.monitor_interval = r.u64();
  p.gamma = get_opt_f64(r);
  p.authority_id = r.str();
  p.participant_id = r.str();
  return p;
}

CreatePayload decode_create(Reader& r) {
  CreatePayload p;
  p.owner = r.str();
  p.commodity_type = r.str();
  p.location_id = r.str();
  p.quantity = r.f64();
  p.properties = get_properties(r);
  return p;
}

MonitorPayload decode_monitor(Reader& r) {
  MonitorPayload p;
  p.gateway_id = r.str();
  p.location_id = r.str();
  const auto n = r.count();
  for (std::uint32_t i = 0; i < n; ++i) {
    trm::Observation o;
    o.sensor_id = r.str();
    o.value = r.f64();
    o.confidence = r.f64();
    o.epoch = r.u64();
    o.location_id = r.str();
    p.readings.push_back(std::move(o));
  }
  return p;
}

ProducePayload decode_produce(Reader& r) {
  ProducePayload p;
  p.producer = r.str();
  p.sources = get_strings(r);
  const auto n = r.count();
  for (std::uint32_t i = 0; i < n; ++i) {
    OutputLot lot;
    lot.batch_id = r.str();
    lot.commodity_type = r.str();
    lot.location_id = r.str();
    lot.quantity = r.f64();
    lot.properties = get_properties(r);
    p.outputs.push_back(std::move(lot));
  }
  p.process_params = get_properties(r);
  return p;
}

InspectPayload decode_inspect(Reader& r) {
  InspectPayload p;
  p.authority_id = r.str();
  p.subject = r.str();
  if (r.boolean()) p.asset_batch_id = r.str();
  p.rating = r.f64();
  p.report_hash = r.fixed<32>();
  return p;
}

TradePayload decode_trade(Reader& r) {
  TradePayload p;
  p.asset_batch_id = r.str();
  p.seller = r.str();
  p.buyer = r.str();
  p.new_batch_id = r.str();
  p.quantity = get_opt_f64(r);
  p.destination_location = r.str();
  const auto n = r.count();
  for (std::uint32_t i = 0; i < n; ++i) {
    TradeTerm t;
    t.term_id = r.str();
    t.description = r.str();
    t.weight = r.f64();
    t.deadline = r.u64();
    t.fulfilled_at = get_opt_u64(r);
    p.terms.push_back(std::move(t));
  }
  if (r.boolean()) p.attachment_hash = r.fixed<32>();
  return p;
}

QueryPayload decode_query(Reader& r) {
  QueryPayload p;
  const auto kind = r.u8();
  if (kind > 2) throw Error(Errc::MalformedTransaction, "unknown query kind");
  p.kind = static_cast<QueryKind>(kind);
  p.subject = r.str();
  return p;
}

}  // namespace

codec::Bytes canonical_bytes(const Transaction& tx) {
  Writer w;
  w.u8(kEncodingVersion);
  w.u8(static_cast<std::uint8_t>(tx.kind()));
  w.str(tx.tx_id);
  w.u64(tx.timestamp);
  std::visit([&](const auto& p) { encode_payload(w, p); }, tx.payload);
  return std::move(w).bytes();
}

Transaction decode_canonical(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (r.u8() != kEncodingVersion) throw Error(Errc::MalformedTransaction, "unsupported encoding version");
  const auto kind = r.u8();
  Transaction tx;
  tx.tx_id = r.str();
  tx.timestamp = r.u64();
  switch (static_cast<TxKind>(kind)) {
    case TxKind::genesis: tx.payload = decode_genesis(r); break;
    case TxKind::join: tx.payload = decode_join(r); break;
    case TxKind::deploy: tx.payload = decode_deploy(r); break;
    case TxKind::create: tx.payload = decode_create(r); break;
    case TxKind::monitor: tx.payload = decode_monitor(r); break;
    case TxKind::produce: tx.payload = decode_produce(r); break;
    case TxKind::inspect: tx.payload = decode_inspect(r); break;
    case TxKind::trade: tx.payload = decode_trade(r); break;
    case TxKind::query: tx.payload = decode_query(r); break;
    default: throw Error(Errc::MalformedTransaction, "unknown transaction kind");
  }
  if (!r.done()) throw Error(Errc::MalformedTransaction, "trailing bytes after transaction");
  return tx;
}

crypto::Digest signing_digest(const Transaction& tx) { return crypto::sha256(canonical_bytes(tx)); }

Transaction sign_tx(Transaction tx, std::string signer, const crypto::KeyPair& key) {
  const auto digest = signing_digest(tx);
  tx.signatures.push_back(Signature{std::move(signer), key.sign(digest)});
  return tx;
}

bool verify_signature(const Transaction& tx, const Signature& sig, const crypto::PublicKey& key) {
  return crypto::verify(key, signing_digest(tx), sig.bytes);
}

void encode_signed(codec::Writer& w, const Transaction& tx) {
  w.raw(canonical_bytes(tx));
  w.u32(static_cast<std::uint32_t>(tx.signatures.size()));
  for (const auto& s : tx.signatures) {
    w.str(s.signer);
    w.fixed(s.bytes);
  }
}

}  // namespace detrm::ledger
