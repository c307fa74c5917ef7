#pragma once

#include <limits>

namespace ssd {

// A real number or +infinity, with the infinite case carried as an explicit
// tag so that infeasibility is never confused with overflow.
class ExtendedReal {
 public:
  static ExtendedReal finite(double v) { return ExtendedReal(false, v); }
  static ExtendedReal infinity() { return ExtendedReal(true, 0.0); }

  bool is_infinite() const noexcept { return infinite_; }
  bool is_finite() const noexcept { return !infinite_; }
  // Finite payload; 0 when infinite.
  double value() const noexcept { return value_; }
  // Lossy conversion for printing and plotting.
  double as_double() const noexcept {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

 private:
  ExtendedReal(bool infinite, double v) : infinite_(infinite), value_(v) {}
  bool infinite_;
  double value_;
};

}  // namespace ssd
