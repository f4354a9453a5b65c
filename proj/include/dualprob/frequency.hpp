#pragma once

// Frequency/amplitude correspondence: seeded trials drawn from {|A_i|^2}, the
// plug-in estimator sqrt(count / N), and convergence over a trial schedule.
//
// Draws come from a counter-based SplitMix64 stream: draw k of a run with
// seed s is mix64(s + (k + 1) * 0x9E3779B97F4A7C15), so any draw can be
// produced independently of the others and partitioned runs merge exactly.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "dualprob/amplitude.hpp"
#include "dualprob/errors.hpp"
#include "dualprob/event_space.hpp"

namespace dualprob {

inline constexpr std::string_view kGeneratorId = "splitmix64-counter/1";

namespace rng {

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 output finalizer (Steele, Lea & Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// 64 random bits for draw `counter` of stream `seed`.
constexpr std::uint64_t draw_bits(std::uint64_t seed, std::uint64_t counter) noexcept {
  return mix64(seed + (counter + 1) * kGamma);
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Seed for schedule entry k: mix64(seed ^ mix64(k + 1)).
constexpr std::uint64_t child_seed(std::uint64_t seed, std::uint64_t k) noexcept {
  return mix64(seed ^ mix64(k + 1));
}

}  // namespace rng

struct TrialLedger {
  std::vector<Outcome> outcomes;
  std::vector<std::uint64_t> counts;  // aligned with outcomes
  std::uint64_t total_n = 0;
  std::uint64_t seed = 0;

  [[nodiscard]] std::uint64_t count(const Outcome& o) const {
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      if (outcomes[i] == o) return counts[i];
    }
    throw usage_error("outcome '" + o.label + "' is not in the ledger");
  }

  friend bool operator==(const TrialLedger&, const TrialLedger&) = default;
};

struct ConvergenceReport {
  std::vector<Outcome> outcomes;
  std::vector<std::uint64_t> schedule;
  std::vector<std::uint64_t> child_seeds;
  std::vector<std::vector<double>> estimates;  // [k][outcome] estimated |A|
  std::vector<double> errors;                  // [k] max |estimate - true|
  std::vector<double> true_magnitudes;
  std::uint64_t seed = 0;

  friend bool operator==(const ConvergenceReport&, const ConvergenceReport&) = default;
};

namespace detail {

/// Inverse-CDF sampler over {|A_i|^2}. Zero-probability outcomes are never
/// returned, even when the cumulative sum rounds short of 1.
class OutcomeSampler {
 public:
  explicit OutcomeSampler(const SampleSpace& space) {
    double acc = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
      const double p = duality_probability(space.amplitudes()[i]).value();
      acc += p;
      if (p > 0.0) {
        cumulative_.push_back(acc);
        index_.push_back(i);
      }
    }
  }

  [[nodiscard]] std::size_t operator()(double u) const noexcept {
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto k = it == cumulative_.end() ? cumulative_.size() - 1
                                           : static_cast<std::size_t>(it - cumulative_.begin());
    return index_[k];
  }

 private:
  std::vector<double> cumulative_;
  std::vector<std::size_t> index_;
};

inline void count_range(const OutcomeSampler& sampler, std::uint64_t seed, std::uint64_t begin,
                        std::uint64_t end, std::vector<std::uint64_t>& counts) {
  for (std::uint64_t k = begin; k < end; ++k) {
    ++counts[sampler(rng::to_unit(rng::draw_bits(seed, k)))];
  }
}

}  // namespace detail

/// n independent draws from {|A_i|^2}. `workers` > 1 splits the draw range
/// across threads; the merged ledger is identical for every worker count.
inline TrialLedger record_trials(const SampleSpace& space, std::uint64_t n, std::uint64_t seed,
                                 unsigned workers = 1) {
  detail::require_normalized(space, "record_trials");
  if (n == 0) throw usage_error("record_trials: n must be >= 1");
  const detail::OutcomeSampler sampler(space);

  TrialLedger ledger{space.outcomes(), std::vector<std::uint64_t>(space.size(), 0), n, seed};
  workers = std::max(1u, workers);
  if (workers == 1 || n < workers) {
    detail::count_range(sampler, seed, 0, n, ledger.counts);
    return ledger;
  }

  std::vector<std::vector<std::uint64_t>> partial(workers,
                                                  std::vector<std::uint64_t>(space.size(), 0));
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::uint64_t chunk = n / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t begin = w * chunk;
      const std::uint64_t end = (w + 1 == workers) ? n : begin + chunk;
      pool.emplace_back([&, w, begin, end] {
        detail::count_range(sampler, seed, begin, end, partial[w]);
      });
    }
  }
  for (const auto& part : partial) {
    for (std::size_t i = 0; i < part.size(); ++i) ledger.counts[i] += part[i];
  }
  return ledger;
}

/// sqrt(count / N) * exp(i phase).
inline Amplitude amplitude_from_frequency(const TrialLedger& ledger, const Outcome& outcome,
                                          double phase = 0.0) {
  if (ledger.total_n == 0) throw usage_error("amplitude_from_frequency: empty ledger");
  const auto c = ledger.count(outcome);
  const double f = static_cast<double>(c) / static_cast<double>(ledger.total_n);
  if (phase == 0.0) return {std::sqrt(f), 0.0};
  return Amplitude::polar(std::sqrt(f), phase);
}

inline ConvergenceReport convergence_report(const SampleSpace& space,
                                            const std::vector<std::uint64_t>& schedule,
                                            std::uint64_t seed, unsigned workers = 1) {
  detail::require_normalized(space, "convergence_report");
  if (schedule.empty()) throw usage_error("convergence_report: empty schedule");
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    if (schedule[k] == 0) throw usage_error("convergence_report: schedule entries must be >= 1");
    if (k > 0 && schedule[k] <= schedule[k - 1]) {
      throw usage_error("convergence_report: schedule must be strictly increasing");
    }
  }

  ConvergenceReport report;
  report.outcomes = space.outcomes();
  report.schedule = schedule;
  report.seed = seed;
  for (const auto& a : space.amplitudes()) {
    report.true_magnitudes.push_back(std::sqrt(duality_probability(a).value()));
  }
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const auto child = rng::child_seed(seed, k);
    const auto ledger = record_trials(space, schedule[k], child, workers);
    std::vector<double> row;
    double worst = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
      const double est = amplitude_from_frequency(ledger, space.outcomes()[i]).magnitude();
      row.push_back(est);
      worst = std::max(worst, std::abs(est - report.true_magnitudes[i]));
    }
    report.child_seeds.push_back(child);
    report.estimates.push_back(std::move(row));
    report.errors.push_back(worst);
  }
  return report;
}

}  // namespace dualprob
