#include "detrm/ledger/offchain_store.hpp"

#include <fstream>
#include <iterator>

#include "detrm/error.hpp"

namespace detrm::ledger {

OffChainStore::OffChainStore(std::filesystem::path directory) : directory_(std::move(directory)) {
  std::error_code ec;
  std::filesystem::create_directories(*directory_, ec);
  if (ec) throw Error(Errc::IoFailure, "cannot create " + directory_->string());
}

crypto::Digest OffChainStore::put(std::string_view content) {
  const auto digest = crypto::sha256(content);
  if (blobs_.emplace(digest, std::string(content)).second && directory_) {
    std::ofstream out(*directory_ / crypto::to_hex(digest), std::ios::binary);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(Errc::IoFailure, "cannot write off-chain blob");
  }
  return digest;
}

std::optional<std::string> OffChainStore::get(const crypto::Digest& digest) const {
  if (auto it = blobs_.find(digest); it != blobs_.end()) return it->second;
  if (directory_) {
    std::ifstream in(*directory_ / crypto::to_hex(digest), std::ios::binary);
    if (in) {
      std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      if (crypto::sha256(content) == digest) return content;
    }
  }
  return std::nullopt;
}

bool OffChainStore::contains(const crypto::Digest& digest) const { return get(digest).has_value(); }

}  // namespace detrm::ledger
