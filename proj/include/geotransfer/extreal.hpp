#pragma once

#include <limits>
#include <ostream>
#include <stdexcept>

namespace geotransfer {

// Extended nonnegative real: a finite double or a distinguished +infinity.
// Divergent series sums must stay distinguishable from large finite values,
// so membership logic branches on is_finite() rather than on magnitude.
//
// Scaling follows the partial-sum-limit convention: 0 * infinity == 0.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  constexpr ExtReal(double v) : v_(v), finite_(true) {}

  static constexpr ExtReal infinity() {
    ExtReal e;
    e.finite_ = false;
    e.v_ = std::numeric_limits<double>::infinity();
    return e;
  }

  constexpr bool is_finite() const { return finite_; }

  double value() const {
    if (!finite_) throw std::domain_error("ExtReal: value() on infinity");
    return v_;
  }

  // Finite value, or +inf as an IEEE double. Only for display/serialization.
  constexpr double as_double() const { return v_; }

  ExtReal operator+(const ExtReal& o) const {
    if (!finite_ || !o.finite_) return infinity();
    return ExtReal(v_ + o.v_);
  }
  ExtReal& operator+=(const ExtReal& o) {
    *this = *this + o;
    return *this;
  }

  // c must be >= 0.
  ExtReal scaled_by(double c) const {
    if (c == 0.0) return ExtReal(0.0);
    if (!finite_) return infinity();
    return ExtReal(c * v_);
  }

  static ExtReal max(const ExtReal& a, const ExtReal& b) {
    if (!a.finite_ || !b.finite_) return infinity();
    return ExtReal(a.v_ > b.v_ ? a.v_ : b.v_);
  }

  bool operator==(const ExtReal& o) const {
    if (finite_ != o.finite_) return false;
    return !finite_ || v_ == o.v_;
  }

  friend std::ostream& operator<<(std::ostream& os, const ExtReal& e) {
    if (!e.finite_) return os << "inf";
    return os << e.v_;
  }

 private:
  double v_ = 0.0;
  bool finite_ = true;
};

}  // namespace geotransfer
