#pragma once

// Line-delimited chain export:
//
//   detrm-chain 1
//   block <height> <prev_hash> <state_root> <block_hash> <tx_count>
//   tx <canonical_bytes_hex> <sig_count> [<signer_hex>:<signature_hex> ...]
//   ...
//
// Digests and bytes are lowercase hex. Signer ids are hex-encoded so the
// line stays whitespace-delimited.

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "detrm/ledger/ledger.hpp"

namespace detrm::ledger {

void write_chain(std::ostream& out, const std::vector<Block>& blocks);

/// Throws Error(ChainFormat) on any structural problem. Does not validate
/// hashes or signatures; use validate_chain for that.
std::vector<Block> read_chain(std::istream& in);

/// Throw Error(IoFailure) when the file cannot be opened.
void save_chain(const std::filesystem::path& path, const std::vector<Block>& blocks);
std::vector<Block> load_chain(const std::filesystem::path& path);

}  // namespace detrm::ledger
