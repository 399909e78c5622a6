#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace cmnet {

/// Closed real interval with outward rounding.
///
/// Every operation widens its round-to-nearest result by one ulp in each
/// direction, which encloses the exact result of the operation on any
/// points of the operands.
class Interval {
 public:
  constexpr Interval() = default;
  constexpr Interval(double x) : lo_(x), hi_(x) {}  // NOLINT: implicit point interval
  Interval(double lo, double hi) : lo_(lo), hi_(hi) {}

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double mid() const { return 0.5 * (lo_ + hi_); }
  double width() const { return hi_ - lo_; }
  bool is_exact_zero() const { return lo_ == 0.0 && hi_ == 0.0; }

  /// Encloses a/b for integers represented exactly as doubles.
  static Interval quotient(double a, double b) { return Interval(a) / Interval(b); }

  friend Interval operator+(Interval a, Interval b) {
    return {down(a.lo_ + b.lo_), up(a.hi_ + b.hi_)};
  }
  friend Interval operator-(Interval a, Interval b) {
    return {down(a.lo_ - b.hi_), up(a.hi_ - b.lo_)};
  }
  friend Interval operator-(Interval a) { return {-a.hi_, -a.lo_}; }
  friend Interval operator*(Interval a, Interval b) {
    if (a.is_exact_zero() || b.is_exact_zero()) return Interval(0.0);
    const double p1 = a.lo_ * b.lo_;
    const double p2 = a.lo_ * b.hi_;
    const double p3 = a.hi_ * b.lo_;
    const double p4 = a.hi_ * b.hi_;
    return {down(std::min({p1, p2, p3, p4})), up(std::max({p1, p2, p3, p4}))};
  }
  /// Requires 0 outside b.
  friend Interval operator/(Interval a, Interval b) {
    const double q1 = a.lo_ / b.lo_;
    const double q2 = a.lo_ / b.hi_;
    const double q3 = a.hi_ / b.lo_;
    const double q4 = a.hi_ / b.hi_;
    return {down(std::min({q1, q2, q3, q4})), up(std::max({q1, q2, q3, q4}))};
  }
  Interval& operator+=(Interval b) { return *this = *this + b; }
  Interval& operator*=(Interval b) { return *this = *this * b; }

  /// Tighter than x*x when the interval straddles zero.
  friend Interval square(Interval a) {
    const double l = std::abs(a.lo_);
    const double h = std::abs(a.hi_);
    const double big = up(std::max(l, h) * std::max(l, h));
    if (a.lo_ <= 0.0 && a.hi_ >= 0.0) return {0.0, big};
    return {down(std::min(l, h) * std::min(l, h)), big};
  }
  friend Interval sqrt(Interval a) {
    return {a.lo_ <= 0.0 ? 0.0 : down(std::sqrt(a.lo_)), up(std::sqrt(a.hi_))};
  }
  /// Hull of the interval and its translate by +-r.
  Interval widened(double r) const { return {down(lo_ - r), up(hi_ + r)}; }

 private:
  static double down(double x) { return std::nextafter(x, -std::numeric_limits<double>::infinity()); }
  static double up(double x) { return std::nextafter(x, std::numeric_limits<double>::infinity()); }

  double lo_ = 0.0;
  double hi_ = 0.0;
};

struct ComplexInterval {
  Interval re;
  Interval im;

  bool is_exact_zero() const { return re.is_exact_zero() && im.is_exact_zero(); }

  friend ComplexInterval operator+(const ComplexInterval& a, const ComplexInterval& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend ComplexInterval operator*(const ComplexInterval& a, const ComplexInterval& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  ComplexInterval& operator+=(const ComplexInterval& b) { return *this = *this + b; }
};

inline ComplexInterval conj(const ComplexInterval& z) { return {z.re, -z.im}; }
inline Interval norm(const ComplexInterval& z) { return square(z.re) + square(z.im); }

}  // namespace cmnet
