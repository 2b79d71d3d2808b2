#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace tcurator {

class IpAddress {
 public:
  enum class Family : std::uint8_t { V4, V6 };

  IpAddress() = default;
  static std::optional<IpAddress> parse(std::string_view text);

  Family family() const noexcept { return family_; }
  std::span<const std::uint8_t> bytes() const noexcept {
    return {bytes_.data(), family_ == Family::V4 ? 4u : 16u};
  }
  std::size_t bit_width() const noexcept { return family_ == Family::V4 ? 32 : 128; }
  std::string to_string() const;

  friend auto operator<=>(const IpAddress&, const IpAddress&) = default;

 private:
  Family family_ = Family::V4;
  std::array<std::uint8_t, 16> bytes_{};
};

/// Network prefix; a bare address parses as a full-length block.
struct CidrBlock {
  IpAddress network;
  std::size_t prefix_length = 0;

  static std::optional<CidrBlock> parse(std::string_view text);
  bool contains(const IpAddress& ip) const noexcept;
  /// Both blocks share at least one address.
  bool overlaps(const CidrBlock& other) const noexcept;
  std::string to_string() const;

  friend auto operator<=>(const CidrBlock&, const CidrBlock&) = default;
};

}  // namespace tcurator

template <>
struct std::hash<tcurator::IpAddress> {
  std::size_t operator()(const tcurator::IpAddress& ip) const noexcept {
    std::size_t h = static_cast<std::size_t>(ip.family());
    for (auto b : ip.bytes()) h = h * 131 + b;
    return h;
  }
};
