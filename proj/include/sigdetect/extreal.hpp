// extreal.hpp - extended real values with tagged infinities.
//
// Limit draws can be +inf with positive probability; carrying a tag instead
// of a floating infinity keeps the markers out of arithmetic.
#pragma once

namespace sigdetect {

class ExtReal {
 public:
  static ExtReal finite(double v) { return ExtReal(v, 0); }
  static ExtReal pos_inf() { return ExtReal(0.0, +1); }
  static ExtReal neg_inf() { return ExtReal(0.0, -1); }

  bool is_finite() const { return tag_ == 0; }
  bool is_pos_inf() const { return tag_ > 0; }
  bool is_neg_inf() const { return tag_ < 0; }
  double value() const { return value_; }  // meaningful only when finite

  bool operator<(const ExtReal& o) const {
    if (tag_ != o.tag_) return tag_ < o.tag_;
    return tag_ == 0 && value_ < o.value_;
  }

 private:
  ExtReal(double v, int tag) : value_(v), tag_(tag) {}
  double value_;
  int tag_;
};

}  // namespace sigdetect
