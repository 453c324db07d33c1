#pragma once

// Read-only HTTP/JSON view of one world-state snapshot.
//
//   GET /participants/{id}/reputation
//   GET /assets/{batch}/trust
//   GET /assets/{batch}/provenance

#include <memory>
#include <string>
#include <string_view>
#include <utility>

#include "detrm/contracts/world_state.hpp"

namespace detrm::api {

struct Response {
  int status = 200;
  std::string body;  // JSON
};

/// Identifiers accepted in paths: 1-128 of [A-Za-z0-9._:-].
bool valid_id(std::string_view id) noexcept;

class QueryService {
 public:
  explicit QueryService(std::shared_ptr<const contracts::WorldState> snapshot);

  /// Routes a GET path. 400 for a malformed id, 404 for an unknown
  /// route or subject.
  Response handle_get(std::string_view path) const;

  const contracts::WorldState& state() const noexcept { return *snapshot_; }

 private:
  std::shared_ptr<const contracts::WorldState> snapshot_;
};

/// HTTP front end over a QueryService.
class HttpServer {
 public:
  explicit HttpServer(const QueryService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Port 0 picks a free port. Returns the bound port; throws
  /// Error(IoFailure).
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Parses `host:port`; throws Error(ConfigError).
std::pair<std::string, int> parse_bind(std::string_view bind);

}  // namespace detrm::api
