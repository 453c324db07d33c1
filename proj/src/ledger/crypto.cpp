#include "detrm/ledger/crypto.hpp"

#include <sodium.h>

#include <algorithm>
#include <stdexcept>

#include "detrm/error.hpp"

namespace detrm::crypto {

namespace {

void ensure_sodium() {
  static const bool ready = [] { return sodium_init() >= 0; }();
  if (!ready) throw std::runtime_error("libsodium initialisation failed");
}

}  // namespace

Digest sha256(std::span<const Byte> data) {
  ensure_sodium();
  Digest out{};
  crypto_hash_sha256(out.data(), data.data(), data.size());
  return out;
}

Digest sha256(std::string_view text) {
  return sha256(std::span<const Byte>(reinterpret_cast<const Byte*>(text.data()), text.size()));
}

KeyPair KeyPair::generate() {
  ensure_sodium();
  KeyPair kp;
  crypto_sign_keypair(kp.public_.data(), kp.secret_.data());
  return kp;
}

KeyPair KeyPair::from_seed(const Seed& seed) {
  ensure_sodium();
  KeyPair kp;
  crypto_sign_seed_keypair(kp.public_.data(), kp.secret_.data(), seed.data());
  return kp;
}

KeyPair KeyPair::derive(std::string_view label) {
  const Digest d = sha256(std::string("detrm-key/").append(label));
  Seed seed{};
  std::copy(d.begin(), d.end(), seed.begin());
  return from_seed(seed);
}

SignatureBytes KeyPair::sign(std::span<const Byte> message) const {
  SignatureBytes sig{};
  crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), secret_.data());
  return sig;
}

bool verify(const PublicKey& key, std::span<const Byte> message, const SignatureBytes& sig) noexcept {
  if (sodium_init() < 0) return false;
  return crypto_sign_verify_detached(sig.data(), message.data(), message.size(), key.data()) == 0;
}

std::string to_hex(std::span<const Byte> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (Byte b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

namespace {

int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw Error(Errc::ChainFormat, "odd-length hex string");
  std::string out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    const int hi = nibble(hex[i]);
    const int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) throw Error(Errc::ChainFormat, "invalid hex digit");
    out.push_back(static_cast<char>((hi << 4) | lo));
  }
  return out;
}

template <std::size_t N>
std::array<Byte, N> array_from_hex(std::string_view hex) {
  const std::string raw = from_hex(hex);
  if (raw.size() != N) throw Error(Errc::ChainFormat, "hex value has wrong length");
  std::array<Byte, N> out{};
  std::copy(raw.begin(), raw.end(), reinterpret_cast<char*>(out.data()));
  return out;
}

template std::array<Byte, 32> array_from_hex<32>(std::string_view);
template std::array<Byte, 64> array_from_hex<64>(std::string_view);

}  // namespace detrm::crypto
