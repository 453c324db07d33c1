#include "detrm/api/service.hpp"

#include <charconv>

#include "httplib.h"
#include "json.hpp"

#include "detrm/contracts/query.hpp"
#include "detrm/error.hpp"

namespace detrm::api {

bool valid_id(std::string_view id) noexcept {
  if (id.empty() || id.size() > 128) return false;
  for (char c : id) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '.' ||
                    c == '_' || c == ':' || c == '-';
    if (!ok) return false;
  }
  return true;
}

namespace {

Response error(int status, std::string_view code, const std::string& message) {
  return {status, nlohmann::json{{"error", code}, {"message", message}}.dump()};
}

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> parts;
  if (const auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
  std::size_t pos = 0;
  while (pos <= path.size()) {
    const auto next = path.find('/', pos);
    const auto part = path.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
    if (!part.empty()) parts.push_back(part);
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

}  // namespace

QueryService::QueryService(std::shared_ptr<const contracts::WorldState> snapshot) : snapshot_(std::move(snapshot)) {}

Response QueryService::handle_get(std::string_view path) const {
  const auto parts = split_path(path);
  if (parts.size() != 3) return error(404, "NotFound", "no route for " + std::string(path));

  const auto collection = parts[0];
  const auto id = parts[1];
  const auto view = parts[2];
  ledger::QueryKind kind;
  if (collection == "participants" && view == "reputation") {
    kind = ledger::QueryKind::reputation;
  } else if (collection == "assets" && view == "trust") {
    kind = ledger::QueryKind::trust;
  } else if (collection == "assets" && view == "provenance") {
    kind = ledger::QueryKind::provenance;
  } else {
    return error(404, "NotFound", "no route for " + std::string(path));
  }
  if (!valid_id(id)) return error(400, "MalformedId", "identifier must match [A-Za-z0-9._:-]{1,128}");
  try {
    return {200, contracts::run_query(*snapshot_, kind, id).dump()};
  } catch (const Error& e) {
    if (e.code() == Errc::UnknownSubject) return error(404, "UnknownSubject", e.what());
    return error(500, to_string(e.code()), e.what());
  }
}

std::pair<std::string, int> parse_bind(std::string_view bind) {
  const auto colon = bind.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw Error(Errc::ConfigError, "--bind expects host:port, got '" + std::string(bind) + "'");
  }
  int port = -1;
  const auto digits = bind.substr(colon + 1);
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || port < 0 || port > 65535) {
    throw Error(Errc::ConfigError, "invalid port in '" + std::string(bind) + "'");
  }
  return {std::string(bind.substr(0, colon)), port};
}

struct HttpServer::Impl {
  explicit Impl(const QueryService& s) : service(s) {}
  const QueryService& service;
  httplib::Server server;
};

HttpServer::HttpServer(const QueryService& service) : impl_(std::make_unique<Impl>(service)) {
  impl_->server.Get(".*", [this](const httplib::Request& req, httplib::Response& res) {
    const auto r = impl_->service.handle_get(req.path);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  int bound = -1;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, port)) {
    bound = port;
  }
  if (bound <= 0) throw Error(Errc::IoFailure, "cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace detrm::api
