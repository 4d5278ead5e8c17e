#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace latsec {

__extension__ typedef __int128 int128;
__extension__ typedef unsigned __int128 uint128;

/// Exact rational number with 64-bit numerator and positive denominator,
/// always stored in lowest terms. Arithmetic is carried out in 128-bit
/// intermediates; a result that does not fit back into 64 bits throws
/// Error(Overflow) instead of wrapping.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t value) : num_(value) {}  // NOLINT(implicit)
  Rational(std::int64_t num, std::int64_t den);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }

  bool is_integer() const noexcept { return den_ == 1; }
  bool is_zero() const noexcept { return num_ == 0; }
  int sign() const noexcept { return (num_ > 0) - (num_ < 0); }
  double to_double() const noexcept {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  /// "n" for integers, "n/d" otherwise.
  std::string str() const;

  /// Accepts "3", "-1/2" and plain decimals such as "0.25" (converted exactly).
  static Rational parse(std::string_view text);

  /// Largest multiple of 1/den not exceeding x.
  static Rational floor_of(double x, std::int64_t den);

  Rational operator-() const;
  Rational& operator+=(const Rational& rhs);
  Rational& operator-=(const Rational& rhs);
  Rational& operator*=(const Rational& rhs);
  Rational& operator/=(const Rational& rhs);

  friend Rational operator+(Rational lhs, const Rational& rhs) { return lhs += rhs; }
  friend Rational operator-(Rational lhs, const Rational& rhs) { return lhs -= rhs; }
  friend Rational operator*(Rational lhs, const Rational& rhs) { return lhs *= rhs; }
  friend Rational operator/(Rational lhs, const Rational& rhs) { return lhs /= rhs; }

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& lhs, const Rational& rhs);

 private:
  static Rational from_wide(int128 num, int128 den);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

Rational abs(const Rational& r);

/// Largest positive rational g such that both a/g and b/g are integers.
/// Both arguments must be positive.
Rational rational_gcd(const Rational& a, const Rational& b);

}  // namespace latsec
