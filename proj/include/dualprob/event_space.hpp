#pragma once

// Classical sample spaces. Each outcome is its own orthogonal basis direction
// carrying one amplitude, so no probability computed here ever contains a
// cross term between distinct outcomes, whatever the phases are.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dualprob/amplitude.hpp"
#include "dualprob/errors.hpp"

namespace dualprob {

inline constexpr double kNormalizationTolerance = 1e-12;

struct Outcome {
  std::string label;

  friend auto operator<=>(const Outcome&, const Outcome&) = default;
};

class SampleSpace {
 public:
  SampleSpace(std::vector<Outcome> outcomes, std::vector<Amplitude> amplitudes)
      : outcomes_(std::move(outcomes)), amplitudes_(std::move(amplitudes)) {
    if (outcomes_.empty()) throw usage_error("sample space needs at least one outcome");
    if (outcomes_.size() != amplitudes_.size()) {
      throw usage_error("sample space: outcome and amplitude counts differ");
    }
    std::unordered_set<std::string> seen;
    for (const auto& o : outcomes_) {
      if (o.label.empty()) throw usage_error("sample space: empty outcome label");
      if (!seen.insert(o.label).second) {
        throw usage_error("sample space: duplicate outcome label '" + o.label + "'");
      }
    }
    total_ = 0.0;
    for (const auto& a : amplitudes_) total_ += duality_probability(a).value();
  }

  [[nodiscard]] const std::vector<Outcome>& outcomes() const noexcept { return outcomes_; }
  [[nodiscard]] const std::vector<Amplitude>& amplitudes() const noexcept { return amplitudes_; }
  [[nodiscard]] std::size_t size() const noexcept { return outcomes_.size(); }

  /// Sum of |A_i|^2 over all outcomes.
  [[nodiscard]] double total_weight() const noexcept { return total_; }
  [[nodiscard]] bool normalized() const noexcept {
    return std::abs(total_ - 1.0) <= kNormalizationTolerance;
  }

  [[nodiscard]] std::optional<std::size_t> find(const Outcome& o) const {
    for (std::size_t i = 0; i < outcomes_.size(); ++i) {
      if (outcomes_[i] == o) return i;
    }
    return std::nullopt;
  }

  [[nodiscard]] std::size_t index_of(const Outcome& o) const {
    if (auto i = find(o)) return *i;
    throw usage_error("outcome '" + o.label + "' is not in the sample space");
  }

 private:
  std::vector<Outcome> outcomes_;
  std::vector<Amplitude> amplitudes_;
  double total_ = 0.0;
};

/// Result of splitting P(1 u 2) into exclusive parts and the interference term.
struct UnionReport {
  Probability p_union;
  SignedProbability p_1_only;
  SignedProbability p_2_only;
  SignedProbability p_intersection;
};

struct GuessStatistics {
  Probability p_correct;
  /// Keyed by (called, fallen).
  std::map<std::pair<Outcome, Outcome>, Probability> joint_table;
};

namespace detail {

inline Probability bounded_probability(double v) {
  if (v > 1.0 + kNormalizationTolerance) {
    throw domain_error("probability exceeds 1 in a normalized space: " + std::to_string(v));
  }
  return Probability(std::min(v, 1.0));  // rounding above 1 within tolerance
}

inline void require_normalized(const SampleSpace& space, const char* op) {
  if (!space.normalized()) {
    throw usage_error(std::string(op) + ": sample space is not normalized (sum |A|^2 = " +
                      std::to_string(space.total_weight()) + ")");
  }
}

}  // namespace detail

namespace detail {

/// Amplitude with |A|^2 = p, phase 0 or pi/4, whichever squares back to p
/// more closely in floating point (phase 0 on ties). sqrt(0.5)^2 is not 0.5
/// in binary, but 2 * (0.5 / 2) is.
inline Amplitude classical_amplitude(double p) {
  const Amplitude flat(std::sqrt(p), 0.0);
  const double h = std::sqrt(p / 2.0);
  const Amplitude diag(h, h);
  const double e0 = std::abs(duality_probability(flat).value() - p);
  const double e1 = std::abs(duality_probability(diag).value() - p);
  return e1 < e0 ? diag : flat;
}

}  // namespace detail

/// Amplitude i gets magnitude sqrt(w_i / sum w); see classical_amplitude for the phase.
inline SampleSpace classical_space(const std::vector<double>& weights,
                                   const std::vector<std::string>& labels) {
  if (weights.empty()) throw usage_error("classical_space: no weights");
  if (weights.size() != labels.size()) {
    throw usage_error("classical_space: weights and labels differ in length");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw usage_error("classical_space: weights must be finite and non-negative");
    }
    sum += w;
  }
  if (!(sum > 0.0)) throw usage_error("classical_space: all weights are zero");

  std::vector<Outcome> outcomes;
  std::vector<Amplitude> amps;
  outcomes.reserve(labels.size());
  amps.reserve(labels.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    outcomes.push_back({labels[i]});
    amps.push_back(detail::classical_amplitude(weights[i] / sum));
  }
  return {std::move(outcomes), std::move(amps)};
}

inline Probability outcome_probability(const SampleSpace& space, const Outcome& outcome) {
  const auto i = space.index_of(outcome);
  const auto p = duality_probability(space.amplitudes()[i]);
  return space.normalized() ? detail::bounded_probability(p.value()) : p;
}

/// Sum of |A_i|^2 over the subset; cross terms are never formed.
inline Probability event_probability(const SampleSpace& space, const std::set<Outcome>& subset) {
  double sum = 0.0;
  for (const auto& o : subset) {
    sum += duality_probability(space.amplitudes()[space.index_of(o)]).value();
  }
  return space.normalized() ? detail::bounded_probability(sum) : Probability(sum);
}

/// Scale every amplitude by one positive real so that sum |A_i|^2 = 1.
inline SampleSpace normalize(const SampleSpace& space) {
  const double total = space.total_weight();
  if (!(total > 0.0)) throw domain_error("normalize: all amplitudes are zero");
  const double scale = 1.0 / std::sqrt(total);
  std::vector<Amplitude> amps;
  amps.reserve(space.size());
  for (const auto& a : space.amplitudes()) amps.push_back(scale * a);
  return {space.outcomes(), std::move(amps)};
}

/// Splits P(1 u 2) given the single-alternative probabilities (other
/// alternative closed) and the interference term:
///   P(1 only) = P1 - I,  P(2 only) = P2 - I,  P(1 u 2) = P1 + P2 + I.
/// The "only" terms are signed and are not clamped.
inline UnionReport union_decomposition(Probability p1_alone, Probability p2_alone,
                                       SignedProbability interference) {
  const double p1 = p1_alone.value();
  const double p2 = p2_alone.value();
  const double x = interference.value;
  if (!std::isfinite(x)) throw domain_error("union_decomposition: non-finite interference");
  // |I| <= 2 sqrt(P1 P2) for any pair of amplitudes.
  const double bound = 2.0 * std::sqrt(p1 * p2);
  if (std::abs(x) > bound + kNormalizationTolerance * std::max(1.0, p1 + p2)) {
    throw domain_error("union_decomposition: interference term exceeds 2 sqrt(P1 P2)");
  }
  double u = p1 + p2 + x;
  if (u < 0.0) u = 0.0;  // rounding only; the bound check above rules out real negatives
  return {Probability(u), {p1 - x}, {p2 - x}, interference};
}

/// Amplitude 1 on the observed outcome, 0 elsewhere.
inline SampleSpace collapse(const SampleSpace& space, const Outcome& observed) {
  const auto k = space.index_of(observed);
  if (!(duality_probability(space.amplitudes()[k]).value() > 0.0)) {
    throw domain_error("collapse: outcome '" + observed.label + "' has zero probability");
  }
  std::vector<Amplitude> amps(space.size(), Amplitude{});
  amps[k] = Amplitude{1.0, 0.0};
  return {space.outcomes(), std::move(amps)};
}

/// Joint distribution of an independent subjective call and objective fall,
/// the caller drawing from the same distribution as the space.
inline GuessStatistics guess_game(const SampleSpace& space) {
  detail::require_normalized(space, "guess_game");
  std::vector<double> p;
  p.reserve(space.size());
  for (const auto& a : space.amplitudes()) p.push_back(duality_probability(a).value());

  GuessStatistics stats;
  double correct = 0.0;
  const auto& outs = space.outcomes();
  for (std::size_t call = 0; call < outs.size(); ++call) {
    for (std::size_t fall = 0; fall < outs.size(); ++fall) {
      const double joint = p[call] * p[fall];
      stats.joint_table.emplace(std::pair{outs[call], outs[fall]}, Probability(joint));
      if (call == fall) correct += joint;
    }
  }
  stats.p_correct = detail::bounded_probability(correct);
  return stats;
}

}  // namespace dualprob
