#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bqs/rng.h"

namespace bqs {

/// A string of classical bits, stored one bit per byte.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t length) : bits_(length, 0) {}
  BitString(std::initializer_list<int> bits);
  explicit BitString(std::vector<std::uint8_t> bits);

  /// Parses "0101"; any other character is rejected.
  static BitString from_string(std::string_view text);
  /// The low `length` bits of `value`, most significant first.
  static BitString from_uint(std::uint64_t value, std::size_t length);
  static BitString random(std::size_t length, Rng &rng);

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  int operator[](std::size_t i) const { return bits_[i]; }
  void set(std::size_t i, int value);
  void push_back(int value);

  /// Most significant bit first; only valid for size() <= 64.
  std::uint64_t to_uint() const;
  std::string to_string() const;
  /// Packs bits MSB-first into bytes and hex-encodes them. The final byte is
  /// zero-padded on the right.
  std::string to_hex() const;

  BitString operator^(const BitString &other) const;
  BitString concat(const BitString &other) const;
  /// Appends zeros up to `length`; never truncates.
  BitString padded(std::size_t length) const;

  std::span<const std::uint8_t> bits() const { return bits_; }

  bool operator==(const BitString &) const = default;
  auto operator<=>(const BitString &) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// One basis per position: 0 for the computational basis (+), 1 for the
/// Hadamard basis (x).
class BasisString {
 public:
  BasisString(std::initializer_list<int> bases);
  explicit BasisString(BitString bases);
  static BasisString uniform(std::size_t length, int basis);
  static BasisString random(std::size_t length, Rng &rng);

  std::size_t size() const { return bases_.size(); }
  int operator[](std::size_t i) const { return bases_[i]; }
  const BitString &as_bits() const { return bases_; }
  std::string to_string() const;

  bool operator==(const BasisString &) const = default;

 private:
  BitString bases_;
};

/// The substring of `x` at positions where `b` equals `basis`, in order.
BitString substring_in_basis(const BitString &x, const BasisString &b, int basis);

/// Hex helpers for transcript payloads.
std::string bytes_to_hex(std::span<const std::uint8_t> bytes);

}  // namespace bqs
