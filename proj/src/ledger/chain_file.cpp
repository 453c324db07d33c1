#include "detrm/ledger/chain_file.hpp"

#include <fstream>
#include <sstream>

namespace detrm::ledger {

namespace {

constexpr std::string_view kHeader = "detrm-chain 1";

std::span<const std::uint8_t> as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

[[noreturn]] void bad(std::size_t line, const std::string& what) {
  throw Error(Errc::ChainFormat, "line " + std::to_string(line) + ": " + what);
}

}  // namespace

void write_chain(std::ostream& out, const std::vector<Block>& blocks) {
  out << kHeader << '\n';
  for (const auto& b : blocks) {
    out << "block " << b.height << ' ' << crypto::to_hex(b.prev_hash) << ' ' << crypto::to_hex(b.state_root)
        << ' ' << crypto::to_hex(b.block_hash) << ' ' << b.transactions.size() << '\n';
    for (const auto& tx : b.transactions) {
      out << "tx " << crypto::to_hex(canonical_bytes(tx)) << ' ' << tx.signatures.size();
      for (const auto& s : tx.signatures) {
        out << ' ' << crypto::to_hex(as_bytes(s.signer)) << ':' << crypto::to_hex(s.bytes);
      }
      out << '\n';
    }
  }
}

std::vector<Block> read_chain(std::istream& in) {
  std::vector<Block> blocks;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line) || line != kHeader) bad(1, "missing chain header");
  ++lineno;

  std::size_t expected_txs = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string tag;
    fields >> tag;
    try {
      if (tag == "block") {
        if (!blocks.empty() && blocks.back().transactions.size() != expected_txs) {
          bad(lineno, "previous block is missing transactions");
        }
        Block b;
        std::string prev, root, hash;
        if (!(fields >> b.height >> prev >> root >> hash >> expected_txs)) bad(lineno, "malformed block line");
        b.prev_hash = crypto::array_from_hex<32>(prev);
        b.state_root = crypto::array_from_hex<32>(root);
        b.block_hash = crypto::array_from_hex<32>(hash);
        blocks.push_back(std::move(b));
      } else if (tag == "tx") {
        if (blocks.empty()) bad(lineno, "transaction before any block");
        if (blocks.back().transactions.size() >= expected_txs) bad(lineno, "block has more transactions than declared");
        std::string body;
        std::size_t sig_count = 0;
        if (!(fields >> body >> sig_count)) bad(lineno, "malformed tx line");
        const std::string raw = crypto::from_hex(body);
        Transaction tx = decode_canonical(as_bytes(raw));
        for (std::size_t i = 0; i < sig_count; ++i) {
          std::string item;
          if (!(fields >> item)) bad(lineno, "missing signature");
          const auto colon = item.find(':');
          if (colon == std::string::npos) bad(lineno, "malformed signature");
          Signature sig;
          sig.signer = crypto::from_hex(std::string_view(item).substr(0, colon));
          sig.bytes = crypto::array_from_hex<64>(std::string_view(item).substr(colon + 1));
          tx.signatures.push_back(std::move(sig));
        }
        std::string extra;
        if (fields >> extra) bad(lineno, "trailing fields");
        blocks.back().transactions.push_back(std::move(tx));
      } else {
        bad(lineno, "unknown record '" + tag + "'");
      }
    } catch (const Error& e) {
      if (e.code() == Errc::ChainFormat) throw;
      bad(lineno, e.what());
    }
  }
  if (!blocks.empty() && blocks.back().transactions.size() != expected_txs) {
    bad(lineno, "last block is missing transactions");
  }
  return blocks;
}

void save_chain(const std::filesystem::path& path, const std::vector<Block>& blocks) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoFailure, "cannot write " + path.string());
  write_chain(out, blocks);
  if (!out) throw Error(Errc::IoFailure, "write failed for " + path.string());
}

std::vector<Block> load_chain(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot read " + path.string());
  return read_chain(in);
}

}  // namespace detrm::ledger
