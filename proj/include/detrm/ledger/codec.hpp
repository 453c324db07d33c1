#pragma once

// Canonical binary encoding: big-endian fixed-width integers, u32
// length-prefixed strings, doubles as their IEEE-754 bit pattern.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "detrm/error.hpp"

namespace detrm::codec {

using Bytes = std::vector<std::uint8_t>;

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }

  void u32(std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }

  void u64(std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }

  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  void boolean(bool v) { u8(v ? 1 : 0); }

  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }

  template <std::size_t N>
  void fixed(const std::array<std::uint8_t, N>& a) {
    out_.insert(out_.end(), a.begin(), a.end());
  }

  void raw(std::span<const std::uint8_t> bytes) { out_.insert(out_.end(), bytes.begin(), bytes.end()); }

  const Bytes& bytes() const& noexcept { return out_; }
  Bytes bytes() && noexcept { return std::move(out_); }

 private:
  Bytes out_;
};

/// Bounds-checked reader; any overrun throws Error(MalformedTransaction).
class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | in_[pos_++];
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | in_[pos_++];
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  bool boolean() {
    const auto b = u8();
    if (b > 1) throw Error(Errc::MalformedTransaction, "boolean byte out of range");
    return b == 1;
  }

  std::string str() {
    const auto n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  template <std::size_t N>
  std::array<std::uint8_t, N> fixed() {
    need(N);
    std::array<std::uint8_t, N> a{};
    std::memcpy(a.data(), in_.data() + pos_, N);
    pos_ += N;
    return a;
  }

  /// Element count for a sequence; rejects counts that cannot fit in the
  /// remaining input.
  std::uint32_t count() {
    const auto n = u32();
    if (n > remaining()) throw Error(Errc::MalformedTransaction, "sequence longer than input");
    return n;
  }

  std::size_t remaining() const noexcept { return in_.size() - pos_; }
  bool done() const noexcept { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw Error(Errc::MalformedTransaction, "truncated input");
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace detrm::codec
