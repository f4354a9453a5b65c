#pragma once

// N-slit interference with exact path lengths.
//
// Magnitude model: every leg (source -> slit, slit -> screen) has magnitude
// N^(-1/4), N being the number of slits in the geometry, so each unobstructed
// path amplitude has magnitude 1/sqrt(N). A per-slit transmission factor
// scales the source leg. No 1/r envelope, no obliquity, no aperture width.
// Leg phase is 2 pi L / lambda with L the Euclidean leg length.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <exception>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "dualprob/amplitude.hpp"
#include "dualprob/errors.hpp"
#include "dualprob/event_space.hpp"

namespace dualprob {

/// Relative tolerance for the |sum A|^2 vs sum_ij A_i* A_j cross-check.
inline constexpr double kDualComputationTolerance = 1e-12;

struct Point2 {
  double x = 0.0;  // longitudinal
  double y = 0.0;  // transverse

  friend constexpr bool operator==(const Point2&, const Point2&) = default;
};

class SlitGeometry {
 public:
  SlitGeometry(Point2 source, std::vector<double> slit_positions, double slit_plane_x,
               double screen_plane_x, double wavelength, std::vector<double> transmissions = {})
      : source_(source),
        slits_(std::move(slit_positions)),
        slit_plane_x_(slit_plane_x),
        screen_plane_x_(screen_plane_x),
        wavelength_(wavelength),
        transmissions_(std::move(transmissions)) {
    if (!std::isfinite(wavelength_) || !(wavelength_ > 0.0)) {
      throw usage_error("wavelength must be > 0");
    }
    if (!std::isfinite(source_.x) || !std::isfinite(source_.y) ||
        !std::isfinite(slit_plane_x_) || !std::isfinite(screen_plane_x_)) {
      throw usage_error("geometry coordinates must be finite");
    }
    if (!(source_.x < slit_plane_x_ && slit_plane_x_ < screen_plane_x_)) {
      throw usage_error("geometry requires source x < slit plane x < screen plane x");
    }
    if (slits_.empty()) throw usage_error("geometry needs at least one slit");
    for (std::size_t i = 0; i < slits_.size(); ++i) {
      if (!std::isfinite(slits_[i])) throw usage_error("slit offsets must be finite");
      if (i > 0 && !(slits_[i] > slits_[i - 1])) {
        throw usage_error("slit offsets must be strictly increasing");
      }
    }
    if (transmissions_.empty()) transmissions_.assign(slits_.size(), 1.0);
    if (transmissions_.size() != slits_.size()) {
      throw usage_error("one transmission factor per slit is required");
    }
    for (double t : transmissions_) {
      if (!std::isfinite(t) || t < 0.0) {
        throw usage_error("transmission factors must be finite and >= 0");
      }
    }
  }

  [[nodiscard]] const Point2& source() const noexcept { return source_; }
  [[nodiscard]] const std::vector<double>& slit_positions() const noexcept { return slits_; }
  [[nodiscard]] double slit_plane_x() const noexcept { return slit_plane_x_; }
  [[nodiscard]] double screen_plane_x() const noexcept { return screen_plane_x_; }
  [[nodiscard]] double wavelength() const noexcept { return wavelength_; }
  [[nodiscard]] const std::vector<double>& transmissions() const noexcept { return transmissions_; }
  [[nodiscard]] std::size_t slit_count() const noexcept { return slits_.size(); }
  [[nodiscard]] double screen_distance() const noexcept { return screen_plane_x_ - slit_plane_x_; }

  void check_index(std::size_t i) const {
    if (i >= slits_.size()) {
      throw usage_error("slit index " + std::to_string(i) + " out of range (" +
                        std::to_string(slits_.size()) + " slits)");
    }
  }

 private:
  Point2 source_;
  std::vector<double> slits_;
  double slit_plane_x_;
  double screen_plane_x_;
  double wavelength_;
  std::vector<double> transmissions_;
};

/// The two legs of one path and their product.
struct PathAmplitude {
  std::size_t slit_index = 0;
  Amplitude leg_source_to_slit;
  Amplitude leg_slit_to_screen;
  Amplitude total;
};

struct IntensityProfile {
  std::vector<double> screen_points;
  std::vector<Probability> probabilities;
};

struct DetectionReport {
  std::vector<SignedProbability> per_detector_probability;
  Probability total;
  SignedProbability interference_part;
};

namespace detail {

/// Sum with no intermediate rounding (Shewchuk expansion): terms that cancel
/// exactly give exactly 0 regardless of order.
inline double exact_sum(std::initializer_list<double> terms) {
  std::vector<double> partials;
  for (double x : terms) {
    std::size_t i = 0;
    for (double y : partials) {
      if (std::abs(x) < std::abs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials[i++] = lo;
      x = hi;
    }
    partials.resize(i);
    partials.push_back(x);
  }
  double total = 0.0;
  for (auto it = partials.rbegin(); it != partials.rend(); ++it) total += *it;
  return total;
}

/// exp(i 2 pi L / lambda); the whole number of cycles is dropped first so
/// sin/cos see a small argument.
inline Amplitude propagate(double magnitude, double length, double wavelength) {
  const double cycles = length / wavelength;
  const double frac = cycles - std::floor(cycles);
  return Amplitude::polar(magnitude, 2.0 * std::numbers::pi * frac);
}

inline void check_open_set(const SlitGeometry& geom, std::span<const std::size_t> open) {
  if (open.empty()) throw usage_error("open slit set is empty");
  std::vector<bool> seen(geom.slit_count(), false);
  for (auto i : open) {
    geom.check_index(i);
    if (seen[i]) throw usage_error("open slit set repeats index " + std::to_string(i));
    seen[i] = true;
  }
}

}  // namespace detail

inline PathAmplitude path_amplitude(const SlitGeometry& geom, std::size_t slit, double y) {
  geom.check_index(slit);
  if (!std::isfinite(y)) throw usage_error("screen coordinate must be finite");
  const double leg_mag = std::pow(static_cast<double>(geom.slit_count()), -0.25);
  const double sy = geom.slit_positions()[slit];
  const double l1 = std::hypot(geom.slit_plane_x() - geom.source().x, sy - geom.source().y);
  const double l2 = std::hypot(geom.screen_distance(), y - sy);
  PathAmplitude p;
  p.slit_index = slit;
  p.leg_source_to_slit =
      detail::propagate(geom.transmissions()[slit] * leg_mag, l1, geom.wavelength());
  p.leg_slit_to_screen = detail::propagate(leg_mag, l2, geom.wavelength());
  p.total = p.leg_source_to_slit * p.leg_slit_to_screen;
  return p;
}

/// (sum |A_i|)^2 over the open set: the largest intensity any phase
/// arrangement could produce. Used as the scale for relative tolerances.
inline double peak_intensity(const SlitGeometry& geom, double y,
                             std::span<const std::size_t> open) {
  detail::check_open_set(geom, open);
  double s = 0.0;
  for (auto i : open) s += path_amplitude(geom, i, y).total.magnitude();
  return s * s;
}

/// |sum_{i in open} A_i|^2, cross-checked against sum_{i,j} A_i* A_j.
/// Throws invariant_error if the two disagree beyond 1e-12 of peak_intensity.
inline Probability arrival_probability(const SlitGeometry& geom, double y,
                                       std::span<const std::size_t> open) {
  detail::check_open_set(geom, open);
  std::vector<Amplitude> amps;
  amps.reserve(open.size());
  double scale_root = 0.0;
  for (auto i : open) {
    amps.push_back(path_amplitude(geom, i, y).total);
    scale_root += amps.back().magnitude();
  }
  const Probability direct = duality_probability(combine_exclusive(amps));

  double pair_re = 0.0;
  double pair_im = 0.0;
  for (const auto& ai : amps) {
    const Amplitude ai_s = conjugate(ai);
    for (const auto& aj : amps) {
      const Amplitude t = ai_s * aj;
      pair_re += t.re();
      pair_im += t.im();
    }
  }
  const double tol = kDualComputationTolerance * scale_root * scale_root;
  if (std::abs(direct.value() - pair_re) > tol || std::abs(pair_im) > tol) {
    throw invariant_error("arrival_probability: direct Born value " +
                          std::to_string(direct.value()) + " disagrees with pairwise sum " +
                          std::to_string(pair_re) + " at y = " + std::to_string(y));
  }
  return direct;
}

inline Probability arrival_probability(const SlitGeometry& geom, double y,
                                       std::initializer_list<std::size_t> open) {
  return arrival_probability(geom, y, std::span<const std::size_t>(open.begin(), open.size()));
}

/// Signed cross term A_i* A_j + A_j* A_i between two distinct slits.
inline SignedProbability pairwise_interference(const SlitGeometry& geom, double y, std::size_t i,
                                               std::size_t j) {
  geom.check_index(i);
  geom.check_index(j);
  if (i == j) throw usage_error("pairwise_interference needs two distinct slits");
  return interference_term(path_amplitude(geom, i, y).total,
                           path_amplitude(geom, j, y).total);
}

/// Third-order residual P123 - P12 - P13 - P23 + P1 + P2 + P3, each term from
/// its own subset-open arrival computation.
inline SignedProbability sorkin_invariant(const SlitGeometry& geom, double y,
                                          const std::array<std::size_t, 3>& triple) {
  const auto [a, b, c] = triple;
  for (auto i : triple) geom.check_index(i);
  if (a == b || a == c || b == c) throw usage_error("sorkin_invariant needs three distinct slits");
  auto p = [&](std::initializer_list<std::size_t> s) {
    return arrival_probability(geom, y, s).value();
  };
  return {detail::exact_sum({p({a, b, c}), -p({a, b}), -p({a, c}), -p({b, c}), p({a}), p({b}),
                             p({c})})};
}

/// Uniform grid of n_points over [y_min, y_max]. Points are independent, so
/// the result is the same for any worker count.
inline IntensityProfile intensity_profile(const SlitGeometry& geom, double y_min, double y_max,
                                          std::size_t n_points, std::span<const std::size_t> open,
                                          unsigned workers = 1) {
  if (!std::isfinite(y_min) || !std::isfinite(y_max) || !(y_min < y_max)) {
    throw usage_error("intensity_profile: need finite y_min < y_max");
  }
  if (n_points < 2) throw usage_error("intensity_profile: need at least 2 points");
  detail::check_open_set(geom, open);

  IntensityProfile prof;
  prof.screen_points.resize(n_points);
  prof.probabilities.resize(n_points);
  const double step = (y_max - y_min) / static_cast<double>(n_points - 1);
  for (std::size_t k = 0; k < n_points; ++k) {
    prof.screen_points[k] = (k + 1 == n_points) ? y_max : y_min + static_cast<double>(k) * step;
  }

  auto fill = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      prof.probabilities[k] = arrival_probability(geom, prof.screen_points[k], open);
    }
  };
  workers = std::clamp<unsigned>(workers, 1u, static_cast<unsigned>(n_points));
  if (workers == 1) {
    fill(0, n_points);
    return prof;
  }
  std::vector<std::exception_ptr> failures(workers);
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = n_points / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = (w + 1 == workers) ? n_points : begin + chunk;
      pool.emplace_back([&, w, begin, end] {
        try {
          fill(begin, end);
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return prof;
}

/// Interior local maxima of a profile, each refined by a three-point
/// parabola through its neighbours. A maximum must stand above both
/// neighbours by more than 1e-9 of the profile's largest value, which keeps
/// rounding ripple on flat profiles from being reported.
inline std::vector<double> locate_maxima(const IntensityProfile& prof) {
  const auto& ys = prof.screen_points;
  const auto& ps = prof.probabilities;
  std::vector<double> peaks;
  if (ps.size() < 3) return peaks;
  double top = 0.0;
  for (const auto& p : ps) top = std::max(top, p.value());
  const double eps = 1e-9 * top;
  for (std::size_t k = 1; k + 1 < ps.size(); ++k) {
    const double l = ps[k - 1].value();
    const double c = ps[k].value();
    const double r = ps[k + 1].value();
    if (!(c > l && c >= r) || !(c - std::min(l, r) > eps)) continue;
    const double curvature = l - 2.0 * c + r;
    double offset = 0.0;
    if (curvature < 0.0) offset = 0.5 * (l - r) / curvature;
    const double h = 0.5 * (ys[k + 1] - ys[k - 1]);
    peaks.push_back(ys[k] + offset * h);
  }
  return peaks;
}

/// Mean spacing between adjacent maxima; NaN with fewer than two maxima.
inline double mean_fringe_spacing(const std::vector<double>& maxima) {
  if (maxima.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  return (maxima.back() - maxima.front()) / static_cast<double>(maxima.size() - 1);
}

/// Ideal which-path detectors, one facing each slit: only the diagonal term
/// (<s|i><i|D_i>)(<D_i|i><i|s>) = |A_i|^2 is realised. No cross term is ever
/// formed, so interference_part is the literal zero.
inline DetectionReport delayed_choice(const SlitGeometry& geom,
                                      std::span<const double> detector_y) {
  if (detector_y.size() != geom.slit_count()) {
    throw usage_error("delayed_choice: need exactly one detector per slit (" +
                      std::to_string(geom.slit_count()) + "), got " +
                      std::to_string(detector_y.size()));
  }
  DetectionReport rep;
  double total = 0.0;
  for (std::size_t i = 0; i < detector_y.size(); ++i) {
    const double p = duality_probability(path_amplitude(geom, i, detector_y[i]).total).value();
    rep.per_detector_probability.push_back({p});
    total += p;
  }
  rep.total = Probability(total);
  rep.interference_part = SignedProbability{0.0};
  return rep;
}

/// Unexamined detectors behave like a classical sample space over "D1".."DN".
inline SampleSpace to_sample_space(const DetectionReport& rep) {
  std::vector<Outcome> outs;
  std::vector<Amplitude> amps;
  for (std::size_t i = 0; i < rep.per_detector_probability.size(); ++i) {
    outs.push_back({"D" + std::to_string(i + 1)});
    amps.emplace_back(std::sqrt(rep.per_detector_probability[i].value), 0.0);
  }
  return normalize(SampleSpace(std::move(outs), std::move(amps)));
}

}  // namespace dualprob
