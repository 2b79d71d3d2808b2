#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <string>

namespace tcurator {

/// Non-negative exact fraction, always stored reduced. Rates of trust live in
/// this type; rounding only happens in to_percent_string().
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::uint64_t num, std::uint64_t den) : num_(num), den_(den == 0 ? 1 : den) {
    if (den == 0) num_ = 0;
    const auto g = std::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  constexpr std::uint64_t numerator() const noexcept { return num_; }
  constexpr std::uint64_t denominator() const noexcept { return den_; }
  constexpr double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend constexpr bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept {
    const unsigned __int128 lhs = static_cast<unsigned __int128>(a.num_) * b.den_;
    const unsigned __int128 rhs = static_cast<unsigned __int128>(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  /// Value times 100, rounded half-up to `decimals` places ("95.17").
  std::string to_percent_string(int decimals = 2) const;
  /// Value rounded half-up to `decimals` places ("0.95").
  std::string to_fixed_string(int decimals) const;

 private:
  std::uint64_t num_ = 0;
  std::uint64_t den_ = 1;
};

}  // namespace tcurator
