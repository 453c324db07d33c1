#pragma once

// SHA-256 digests and Ed25519 keys (libsodium).

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace detrm::crypto {

using Byte = std::uint8_t;
using Digest = std::array<Byte, 32>;
using PublicKey = std::array<Byte, 32>;
using SecretKey = std::array<Byte, 64>;
using SignatureBytes = std::array<Byte, 64>;
using Seed = std::array<Byte, 32>;

inline constexpr Digest kZeroDigest{};

Digest sha256(std::span<const Byte> data);
Digest sha256(std::string_view text);

class KeyPair {
 public:
  /// Fresh random key.
  static KeyPair generate();
  /// Deterministic key from a 32-byte seed.
  static KeyPair from_seed(const Seed& seed);
  /// Deterministic key derived from an arbitrary label; used by scenarios.
  static KeyPair derive(std::string_view label);

  const PublicKey& public_key() const noexcept { return public_; }
  SignatureBytes sign(std::span<const Byte> message) const;

 private:
  KeyPair() = default;
  PublicKey public_{};
  SecretKey secret_{};
};

bool verify(const PublicKey& key, std::span<const Byte> message, const SignatureBytes& sig) noexcept;

std::string to_hex(std::span<const Byte> bytes);
/// Throws Error(ChainFormat) on odd length or a non-hex digit.
std::string from_hex(std::string_view hex);

template <std::size_t N>
std::array<Byte, N> array_from_hex(std::string_view hex);

}  // namespace detrm::crypto
