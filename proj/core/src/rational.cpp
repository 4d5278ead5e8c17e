#include "latsec/rational.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "latsec/error.hpp"

namespace latsec {
namespace {

int128 gcd_wide(int128 a, int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool fits(int128 v) {
  return v >= std::numeric_limits<std::int64_t>::min() &&
         v <= std::numeric_limits<std::int64_t>::max();
}

std::int64_t parse_int(std::string_view text) {
  std::int64_t value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last) {
    throw Error(ErrorCode::InvalidArgument,
                "not an integer: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  *this = from_wide(num, den);
}

Rational Rational::from_wide(int128 num, int128 den) {
  if (den == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const int128 g = gcd_wide(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (!fits(num) || !fits(den)) {
    throw Error(ErrorCode::Overflow, "rational does not fit in 64 bits");
  }
  Rational r;
  r.num_ = static_cast<std::int64_t>(num);
  r.den_ = static_cast<std::int64_t>(den);
  return r;
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    return Rational(parse_int(text.substr(0, slash)),
                    parse_int(text.substr(slash + 1)));
  }
  if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    const std::string_view whole = text.substr(0, dot);
    const std::string_view frac = text.substr(dot + 1);
    if (frac.size() > 18) {
      throw Error(ErrorCode::InvalidArgument, "too many decimal digits");
    }
    const bool negative = !whole.empty() && whole.front() == '-';
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    const std::int64_t w =
        (whole.empty() || whole == "-" || whole == "+") ? 0 : parse_int(whole);
    const std::int64_t f = frac.empty() ? 0 : parse_int(frac);
    if (f < 0) throw Error(ErrorCode::InvalidArgument, "malformed decimal");
    const int128 magnitude =
        static_cast<int128>(w < 0 ? -w : w) * scale + f;
    return from_wide(negative ? -magnitude : magnitude, scale);
  }
  return Rational(parse_int(text));
}

Rational Rational::floor_of(double x, std::int64_t den) {
  if (!std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "non-finite value");
  const long double scaled = std::floor(static_cast<long double>(x) * den);
  if (std::fabs(scaled) > 9.0e18L) throw Error(ErrorCode::Overflow, "value too large");
  return Rational(static_cast<std::int64_t>(scaled), den);
}

Rational Rational::operator-() const {
  return from_wide(-static_cast<int128>(num_), den_);
}

Rational& Rational::operator+=(const Rational& rhs) {
  *this = from_wide(static_cast<int128>(num_) * rhs.den_ +
                        static_cast<int128>(rhs.num_) * den_,
                    static_cast<int128>(den_) * rhs.den_);
  return *this;
}

Rational& Rational::operator-=(const Rational& rhs) { return *this += -rhs; }

Rational& Rational::operator*=(const Rational& rhs) {
  *this = from_wide(static_cast<int128>(num_) * rhs.num_,
                    static_cast<int128>(den_) * rhs.den_);
  return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
  if (rhs.num_ == 0) throw Error(ErrorCode::InvalidArgument, "division by zero");
  *this = from_wide(static_cast<int128>(num_) * rhs.den_,
                    static_cast<int128>(den_) * rhs.num_);
  return *this;
}

std::strong_ordering operator<=>(const Rational& lhs, const Rational& rhs) {
  const int128 l = static_cast<int128>(lhs.num_) * rhs.den_;
  const int128 r = static_cast<int128>(rhs.num_) * lhs.den_;
  return l <=> r;
}

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

Rational rational_gcd(const Rational& a, const Rational& b) {
  if (a.sign() <= 0 || b.sign() <= 0) {
    throw Error(ErrorCode::InvalidArgument, "rational_gcd needs positive arguments");
  }
  // gcd(a/b, c/d) = gcd(a*d, c*b) / (b*d)
  const int128 x = static_cast<int128>(a.num()) * b.den();
  const int128 y = static_cast<int128>(b.num()) * a.den();
  const int128 g = gcd_wide(x, y);
  const int128 d = static_cast<int128>(a.den()) * b.den();
  const int128 h = gcd_wide(g, d);
  const int128 num = g / h;
  const int128 den = d / h;
  if (!fits(num) || !fits(den)) throw Error(ErrorCode::Overflow, "gcd overflow");
  return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

}  // namespace latsec
