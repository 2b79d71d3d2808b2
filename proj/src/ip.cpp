#include "tcurator/ip.hpp"

#include <arpa/inet.h>

#include <charconv>

namespace tcurator {

std::optional<IpAddress> IpAddress::parse(std::string_view text) {
  if (text.empty() || text.size() > 64) return std::nullopt;
  const std::string buf(text);
  IpAddress ip;
  if (buf.find(':') == std::string::npos) {
    in_addr a4{};
    if (inet_pton(AF_INET, buf.c_str(), &a4) != 1) return std::nullopt;
    ip.family_ = Family::V4;
    const auto* p = reinterpret_cast<const std::uint8_t*>(&a4);
    std::copy(p, p + 4, ip.bytes_.begin());
  } else {
    in6_addr a6{};
    if (inet_pton(AF_INET6, buf.c_str(), &a6) != 1) return std::nullopt;
    ip.family_ = Family::V6;
    const auto* p = reinterpret_cast<const std::uint8_t*>(&a6);
    std::copy(p, p + 16, ip.bytes_.begin());
  }
  return ip;
}

std::string IpAddress::to_string() const {
  char buf[INET6_ADDRSTRLEN] = {};
  inet_ntop(family_ == Family::V4 ? AF_INET : AF_INET6, bytes_.data(), buf, sizeof buf);
  return buf;
}

namespace {

bool prefix_equal(const IpAddress& a, const IpAddress& b, std::size_t bits) {
  if (a.family() != b.family()) return false;
  const auto x = a.bytes();
  const auto y = b.bytes();
  std::size_t i = 0;
  for (; bits >= 8; bits -= 8, ++i) {
    if (x[i] != y[i]) return false;
  }
  if (bits == 0) return true;
  const auto mask = static_cast<std::uint8_t>(0xFF << (8 - bits));
  return (x[i] & mask) == (y[i] & mask);
}

}  // namespace

std::optional<CidrBlock> CidrBlock::parse(std::string_view text) {
  const auto slash = text.find('/');
  auto ip = IpAddress::parse(text.substr(0, slash));
  if (!ip) return std::nullopt;
  CidrBlock block{*ip, ip->bit_width()};
  if (slash != std::string_view::npos) {
    const auto digits = text.substr(slash + 1);
    std::size_t len = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), len);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty() || len > ip->bit_width()) {
      return std::nullopt;
    }
    block.prefix_length = len;
  }
  return block;
}

bool CidrBlock::contains(const IpAddress& ip) const noexcept { return prefix_equal(network, ip, prefix_length); }

bool CidrBlock::overlaps(const CidrBlock& other) const noexcept {
  return prefix_equal(network, other.network, std::min(prefix_length, other.prefix_length));
}

std::string CidrBlock::to_string() const { return network.to_string() + "/" + std::to_string(prefix_length); }

}  // namespace tcurator
