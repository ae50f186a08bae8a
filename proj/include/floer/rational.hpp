#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace floer {

// Exact rational number used for gradings. Kept deliberately small:
// gradings in a data set share one global denominator, so numerators and
// denominators stay tiny and int64 arithmetic never overflows in practice.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(std::int64_t n) : num_(n), den_(1) {}
  Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_integer() const { return den_ == 1; }

  Rational operator+(const Rational& o) const {
    return Rational(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
  }
  Rational operator-(const Rational& o) const {
    return Rational(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
  }
  Rational operator-() const { return Rational(-num_, den_); }
  Rational operator*(const Rational& o) const {
    return Rational(num_ * o.num_, den_ * o.den_);
  }
  Rational operator/(const Rational& o) const {
    if (o.num_ == 0) throw std::domain_error("Rational: division by zero");
    return Rational(num_ * o.den_, den_ * o.num_);
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }

  bool operator==(const Rational& o) const {
    return num_ == o.num_ && den_ == o.den_;
  }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const {
    return num_ * o.den_ < o.num_ * den_;
  }
  bool operator<=(const Rational& o) const { return !(o < *this); }
  bool operator>(const Rational& o) const { return o < *this; }
  bool operator>=(const Rational& o) const { return !(*this < o); }

  // Fractional part in [0,1): x - floor(x).
  Rational fractional_part() const {
    std::int64_t f = num_ >= 0 ? num_ / den_
                               : -((-num_ + den_ - 1) / den_);
    return *this - Rational(f);
  }

  // Exact serialized form, always "num/den" with den > 0.
  std::string to_fraction_string() const {
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  // Compact display form: integers print without the denominator.
  std::string to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return to_fraction_string();
  }

  static Rational parse(const std::string& s);

 private:
  void normalize() {
    if (den_ == 0) throw std::domain_error("Rational: zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num_;
  std::int64_t den_;
};

inline Rational Rational::parse(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos)
      return Rational(std::stoll(s));
    return Rational(std::stoll(s.substr(0, slash)),
                    std::stoll(s.substr(slash + 1)));
  } catch (const std::exception&) {
    throw std::invalid_argument("not a rational: '" + s + "'");
  }
}

}  // namespace floer
