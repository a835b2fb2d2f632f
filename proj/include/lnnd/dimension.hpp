#pragma once

#include <string>

#include "lnnd/errors.hpp"

namespace lnnd {

/// Ambient dimension of the point cloud; always at least 2.
class Dimension {
 public:
  explicit Dimension(int d) : d_(d) {
    if (d < 2) {
      throw DomainError("dimension must be >= 2, got " + std::to_string(d));
    }
  }

  int value() const noexcept { return d_; }
  double as_double() const noexcept { return static_cast<double>(d_); }

  friend bool operator==(Dimension, Dimension) = default;

 private:
  int d_;
};

/// Which normalizing constant multiplies e^{-r^2/2} r^{d-1} in the radial density.
///
/// `paper` is (2 pi)^{-d/2} / d; it does not
/// integrate to one. `normalized` is [2^{d/2-1} Gamma(d/2)]^{-1}, the chi
/// density constant. Both are kept so formulas can be reproduced verbatim.
enum class ConstantVariant { paper, normalized };

inline const char* to_string(ConstantVariant v) {
  return v == ConstantVariant::paper ? "paper" : "normalized";
}

inline ConstantVariant parse_constant_variant(const std::string& s) {
  if (s == "paper") return ConstantVariant::paper;
  if (s == "normalized") return ConstantVariant::normalized;
  throw DomainError("unknown constant variant '" + s + "' (expected paper|normalized)");
}

}  // namespace lnnd
