#pragma once

// Amplitude algebra. A probability is the product of an objective amplitude
// with its conjugate (subjective) mirror; everything here is a pure function
// over immutable values.

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>

#include "dualprob/errors.hpp"

namespace dualprob {

/// Complex amplitude stored as (re, im). Both components are always finite.
class Amplitude {
 public:
  constexpr Amplitude() = default;

  Amplitude(double re, double im) : re_(re), im_(im) {
    if (!std::isfinite(re) || !std::isfinite(im)) {
      throw domain_error("amplitude components must be finite");
    }
  }

  static Amplitude polar(double magnitude, double phase) {
    if (!std::isfinite(magnitude) || !std::isfinite(phase) || magnitude < 0.0) {
      throw domain_error("polar amplitude needs finite magnitude >= 0 and finite phase");
    }
    return {magnitude * std::cos(phase), magnitude * std::sin(phase)};
  }

  static Amplitude from_complex(std::complex<double> z) { return {z.real(), z.imag()}; }

  [[nodiscard]] constexpr double re() const noexcept { return re_; }
  [[nodiscard]] constexpr double im() const noexcept { return im_; }

  [[nodiscard]] double magnitude() const noexcept { return std::hypot(re_, im_); }

  /// Phase in (-pi, pi]. atan2 yields -pi for (-x, -0.0); that is folded onto +pi.
  [[nodiscard]] double phase() const noexcept {
    const double p = std::atan2(im_, re_);
    return p == -std::numbers::pi ? std::numbers::pi : p;
  }

  [[nodiscard]] std::complex<double> to_complex() const noexcept { return {re_, im_}; }

  friend constexpr bool operator==(const Amplitude&, const Amplitude&) = default;

 private:
  double re_ = 0.0;
  double im_ = 0.0;
};

/// Real value that may be negative: interference terms, "only" probabilities,
/// third-order residuals.
struct SignedProbability {
  double value = 0.0;

  friend constexpr bool operator==(const SignedProbability&, const SignedProbability&) = default;
};

/// Non-negative real. Only event-space callers additionally bound it by 1.
class Probability {
 public:
  constexpr Probability() = default;

  explicit Probability(double value) : value_(value) {
    if (!std::isfinite(value) || value < 0.0) {
      throw domain_error("probability must be finite and non-negative, got " +
                         std::to_string(value));
    }
  }

  [[nodiscard]] constexpr double value() const noexcept { return value_; }

  friend constexpr bool operator==(const Probability&, const Probability&) = default;

 private:
  double value_ = 0.0;
};

inline Amplitude operator+(const Amplitude& a, const Amplitude& b) {
  return {a.re() + b.re(), a.im() + b.im()};
}

inline Amplitude operator*(const Amplitude& a, const Amplitude& b) {
  return {a.re() * b.re() - a.im() * b.im(), a.re() * b.im() + a.im() * b.re()};
}

inline Amplitude operator*(double s, const Amplitude& a) { return {s * a.re(), s * a.im()}; }

/// Subjective assignment mirroring the objective amplitude: A_s = A_o*.
inline Amplitude conjugate(const Amplitude& a) { return {a.re(), -a.im()}; }

/// P = A_s * A_o = |A_o|^2, formed as re^2 + im^2 so the result has no
/// imaginary residue at all.
inline Probability duality_probability(const Amplitude& a) {
  return Probability(a.re() * a.re() + a.im() * a.im());
}

/// Sum of amplitudes of mutually exclusive alternatives, accumulated strictly
/// in list order.
inline Amplitude combine_exclusive(std::span<const Amplitude> amps) {
  if (amps.empty()) throw usage_error("combine_exclusive: empty amplitude list");
  double re = 0.0;
  double im = 0.0;
  for (const auto& a : amps) {
    re += a.re();
    im += a.im();
  }
  return {re, im};
}

/// Product of amplitudes of independent stages.
inline Amplitude combine_independent(std::span<const Amplitude> amps) {
  if (amps.empty()) throw usage_error("combine_independent: empty amplitude list");
  Amplitude acc = amps.front();
  for (const auto& a : amps.subspan(1)) acc = acc * a;
  return acc;
}

/// a1* a2 + a2* a1 = 2 Re(a1* a2) = 2 |a1||a2| cos(phase2 - phase1).
inline SignedProbability interference_term(const Amplitude& a1, const Amplitude& a2) {
  const double v = 2.0 * (a1.re() * a2.re() + a1.im() * a2.im());
  if (!std::isfinite(v)) throw domain_error("interference term overflowed");
  return {v};
}

}  // namespace dualprob
