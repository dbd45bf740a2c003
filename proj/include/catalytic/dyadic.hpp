#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>

namespace catalytic {

// Exact rational of the form numerator / 2^exponent. Kept normalized: the
// numerator is odd or the value is zero with exponent 0.
class Dyadic {
 public:
  using Integer = boost::multiprecision::cpp_int;

  Dyadic() = default;
  Dyadic(Integer numerator, unsigned exponent)
      : num_(std::move(numerator)), exp_(exponent) {
    normalize();
  }

  static Dyadic zero() { return {}; }
  static Dyadic one() { return {1, 0}; }

  const Integer& numerator() const { return num_; }
  unsigned exponent() const { return exp_; }
  Integer denominator() const { return Integer{1} << exp_; }

  // (a + b) / 2, the step of the acceptance probability recursion.
  static Dyadic average(const Dyadic& a, const Dyadic& b) {
    unsigned e = std::max(a.exp_, b.exp_);
    Integer sum = (a.num_ << (e - a.exp_)) + (b.num_ << (e - b.exp_));
    return Dyadic(std::move(sum), e + 1);
  }

  // Sign of this - p/q for a nonnegative fraction p/q, q > 0.
  int compare_fraction(std::uint64_t p, std::uint64_t q) const {
    Integer lhs = num_ * q;
    Integer rhs = Integer{p} << exp_;
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
  }

  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.exp_ == b.exp_ && a.num_ == b.num_;
  }
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
    unsigned e = std::max(a.exp_, b.exp_);
    Integer l = a.num_ << (e - a.exp_);
    Integer r = b.num_ << (e - b.exp_);
    if (l < r) return std::strong_ordering::less;
    if (l > r) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  std::string to_string() const {
    if (exp_ == 0) return num_.str();
    return num_.str() + "/" + denominator().str();
  }

  friend std::ostream& operator<<(std::ostream& os, const Dyadic& d) {
    return os << d.to_string();
  }

 private:
  void normalize() {
    if (num_ == 0) {
      exp_ = 0;
      return;
    }
    while (exp_ > 0 && (num_ & 1) == 0) {
      num_ >>= 1;
      --exp_;
    }
  }

  Integer num_ = 0;
  unsigned exp_ = 0;
};

}  // namespace catalytic
