#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "detrm/ledger/crypto.hpp"

namespace detrm::ledger {

/// Content-addressed blob store for inspection reports and trade
/// attachments. Only the digest goes on-chain. With a directory the
/// blobs are also written to `<dir>/<hex digest>`.
class OffChainStore {
 public:
  OffChainStore() = default;
  explicit OffChainStore(std::filesystem::path directory);

  crypto::Digest put(std::string_view content);
  std::optional<std::string> get(const crypto::Digest& digest) const;
  bool contains(const crypto::Digest& digest) const;
  std::size_t size() const noexcept { return blobs_.size(); }

 private:
  std::map<crypto::Digest, std::string> blobs_;
  std::optional<std::filesystem::path> directory_;
};

}  // namespace detrm::ledger
