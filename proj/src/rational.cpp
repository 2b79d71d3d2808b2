#include "tcurator/rational.hpp"

namespace tcurator {
namespace {

std::string render_scaled(std::uint64_t num, std::uint64_t den, unsigned __int128 scale, int decimals) {
  // round(num * scale * 10^decimals / den), half-up
  unsigned __int128 unit = 1;
  for (int i = 0; i < decimals; ++i) unit *= 10;
  const unsigned __int128 scaled = static_cast<unsigned __int128>(num) * scale * unit;
  const unsigned __int128 rounded = (scaled * 2 + den) / (static_cast<unsigned __int128>(den) * 2);
  const auto whole = static_cast<std::uint64_t>(rounded / unit);
  auto frac = static_cast<std::uint64_t>(rounded % unit);
  std::string out = std::to_string(whole);
  if (decimals > 0) {
    std::string digits = std::to_string(frac);
    out += '.';
    out += std::string(static_cast<std::size_t>(decimals) - digits.size(), '0');
    out += digits;
  }
  return out;
}

}  // namespace

std::string Rational::to_percent_string(int decimals) const { return render_scaled(num_, den_, 100, decimals); }

std::string Rational::to_fixed_string(int decimals) const { return render_scaled(num_, den_, 1, decimals); }

}  // namespace tcurator
