#pragma once

// Runs a parsed experiment and renders its CSV table and JSON summary.
// Rendering is separate from writing so output bytes can be compared
// without touching the filesystem.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "json.hpp"

#include "dualprob/amplitude.hpp"
#include "dualprob/config.hpp"
#include "dualprob/event_space.hpp"
#include "dualprob/frequency.hpp"
#include "dualprob/slit_sim.hpp"

namespace dualprob {

inline constexpr double kSorkinNullTolerance = 1e-10;

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitIo = 3, kExitInvariant = 4 };

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  bool timestamp = true;
  unsigned workers = 1;
};

struct OutputFile {
  std::filesystem::path path;
  std::string content;
};

namespace detail {

using Json = nlohmann::ordered_json;

class CsvTable {
 public:
  explicit CsvTable(std::initializer_list<std::string_view> header) {
    bool first = true;
    for (auto h : header) {
      text_ += first ? "" : ",";
      text_ += h;
      first = false;
    }
    text_ += '\n';
  }

  template <typename... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((text_ += (first ? "" : ","), text_ += cell(cells), first = false), ...);
    text_ += '\n';
  }

  [[nodiscard]] const std::string& str() const noexcept { return text_; }

 private:
  static std::string cell(double v) { return config::format_double(v); }
  static std::string cell(std::uint64_t v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }

  std::string text_;
};

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

inline Json geometry_json(const config::GeometryParams& g) {
  return Json{{"wavelength_m", g.wavelength},     {"slit_positions_m", g.slit_positions},
              {"slit_plane_x_m", g.slit_plane_x}, {"screen_plane_x_m", g.screen_plane_x},
              {"source_m", {g.source_x, g.source_y}}, {"transmissions", g.transmissions}};
}

/// lambda L / d when the open slits are evenly spaced by d, else NaN.
inline double far_field_spacing(const config::GeometryParams& g,
                                const std::vector<std::size_t>& open) {
  if (open.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> ys;
  for (auto i : open) ys.push_back(g.slit_positions[i]);
  std::sort(ys.begin(), ys.end());
  const double d = ys[1] - ys[0];
  for (std::size_t k = 2; k < ys.size(); ++k) {
    if (std::abs((ys[k] - ys[k - 1]) - d) > 1e-9 * d) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  }
  return g.wavelength * (g.screen_plane_x - g.slit_plane_x) / d;
}

struct Rendered {
  std::string csv;
  Json summary;
};

inline Rendered render_coin(const config::CoinParams& p) {
  const auto space = classical_space(p.weights, p.labels);
  Rendered out;
  CsvTable csv({"outcome", "probability"});
  Json outcomes = Json::array();
  double total = 0.0;
  for (const auto& o : space.outcomes()) {
    const double prob = outcome_probability(space, o).value();
    total += prob;
    csv.row(o.label, prob);
    outcomes.push_back({{"label", o.label}, {"probability", prob}});
  }
  const auto game = guess_game(space);
  Json joint = Json::array();
  for (const auto& [key, prob] : game.joint_table) {
    joint.push_back({{"call", key.first.label}, {"fall", key.second.label},
                     {"probability", prob.value()}});
  }
  out.csv = csv.str();
  out.summary = {{"outcomes", outcomes},
                 {"total_probability", total},
                 {"guess_game", {{"p_correct", game.p_correct.value()}, {"joint", joint}}}};
  return out;
}

inline Rendered render_nslit(const config::NSlitParams& p, const RunOptions& opt) {
  const auto geom = p.geometry.build();
  const auto prof = intensity_profile(geom, p.scan.y_min, p.scan.y_max, p.scan.n_points,
                                      p.open_slits, opt.workers);
  Rendered out;
  CsvTable csv({"y_m", "probability"});
  double peak = 0.0;
  std::vector<double> probs;
  for (std::size_t k = 0; k < prof.screen_points.size(); ++k) {
    const double v = prof.probabilities[k].value();
    csv.row(prof.screen_points[k], v);
    probs.push_back(v);
    peak = std::max(peak, v);
  }
  const auto maxima = locate_maxima(prof);
  out.csv = csv.str();
  out.summary = {{"geometry", geometry_json(p.geometry)},
                 {"open_slits", p.open_slits},
                 {"y_min_m", p.scan.y_min},
                 {"y_max_m", p.scan.y_max},
                 {"n_points", p.scan.n_points},
                 {"peak_probability", peak},
                 {"peak_positions_m", maxima},
                 {"fringe_spacing_m", mean_fringe_spacing(maxima)},
                 {"far_field_spacing_m", far_field_spacing(p.geometry, p.open_slits)}};
  out.summary["profile"] = {{"y_m", prof.screen_points}, {"probability", probs}};
  return out;
}

inline Rendered render_sorkin(const config::SorkinParams& p) {
  const auto geom = p.geometry.build();
  const auto [a, b, c] = p.triple;
  const std::vector<std::size_t> open{a, b, c};
  const double step = (p.scan.y_max - p.scan.y_min) / static_cast<double>(p.scan.n_points - 1);

  Rendered out;
  CsvTable csv({"y_m", "I3", "peak_scale"});
  double max_abs = 0.0;
  double max_scale = 0.0;
  double max_rel = 0.0;
  double max_abs_i2 = 0.0;
  std::vector<double> ys, i3s, scales;
  for (std::size_t k = 0; k < p.scan.n_points; ++k) {
    const double y =
        (k + 1 == p.scan.n_points) ? p.scan.y_max : p.scan.y_min + static_cast<double>(k) * step;
    const double i3 = sorkin_invariant(geom, y, p.triple).value;
    const double scale = peak_intensity(geom, y, open);
    csv.row(y, i3, scale);
    ys.push_back(y);
    i3s.push_back(i3);
    scales.push_back(scale);
    max_abs = std::max(max_abs, std::abs(i3));
    max_scale = std::max(max_scale, scale);
    if (scale > 0.0) max_rel = std::max(max_rel, std::abs(i3) / scale);
    max_abs_i2 = std::max(max_abs_i2, std::abs(pairwise_interference(geom, y, a, b).value));
  }
  out.csv = csv.str();
  out.summary = {{"geometry", geometry_json(p.geometry)},
                 {"triple", p.triple},
                 {"n_points", p.scan.n_points},
                 {"max_abs_I3", max_abs},
                 {"peak_scale", max_scale},
                 {"max_relative_I3", max_rel},
                 {"null_tolerance", kSorkinNullTolerance},
                 {"sorkin_null_holds", max_abs <= kSorkinNullTolerance * max_scale},
                 {"max_abs_I2_first_pair", max_abs_i2}};
  out.summary["table"] = {{"y_m", ys}, {"I3", i3s}, {"peak_scale", scales}};
  return out;
}

inline Rendered render_delayed(const config::DelayedParams& p) {
  const auto geom = p.geometry.build();
  const auto rep = delayed_choice(geom, p.detectors);
  Rendered out;
  CsvTable csv({"detector", "slit_index", "y_m", "probability"});
  Json detectors = Json::array();
  for (std::size_t i = 0; i < p.detectors.size(); ++i) {
    const double v = rep.per_detector_probability[i].value;
    const std::string name = "D" + std::to_string(i + 1);
    csv.row(name, static_cast<std::uint64_t>(i), p.detectors[i], v);
    detectors.push_back(
        {{"detector", name}, {"slit_index", i}, {"y_m", p.detectors[i]}, {"probability", v}});
  }
  out.csv = csv.str();
  out.summary = {{"geometry", geometry_json(p.geometry)},
                 {"per_detector", detectors},
                 {"total", rep.total.value()},
                 {"interference_part", rep.interference_part.value}};
  return out;
}

inline Rendered render_freq(const config::FreqParams& p, const RunOptions& opt) {
  const auto space = classical_space(p.weights, p.labels);
  const auto rep = convergence_report(space, p.schedule, p.seed, opt.workers);
  Rendered out;
  CsvTable csv({"N", "outcome", "estimate", "abs_error"});
  Json rows = Json::array();
  for (std::size_t k = 0; k < rep.schedule.size(); ++k) {
    for (std::size_t i = 0; i < rep.outcomes.size(); ++i) {
      const double est = rep.estimates[k][i];
      const double err = std::abs(est - rep.true_magnitudes[i]);
      csv.row(rep.schedule[k], rep.outcomes[i].label, est, err);
    }
    rows.push_back({{"N", rep.schedule[k]},
                    {"child_seed", rep.child_seeds[k]},
                    {"estimates", rep.estimates[k]},
                    {"max_abs_error", rep.errors[k]}});
  }
  std::vector<std::string> labels;
  for (const auto& o : rep.outcomes) labels.push_back(o.label);
  out.csv = csv.str();
  out.summary = {{"generator", std::string(kGeneratorId)},
                 {"seed", p.seed},
                 {"phase", p.phase},
                 {"outcomes", labels},
                 {"true_magnitudes", rep.true_magnitudes},
                 {"convergence", rows}};
  return out;
}

}  // namespace detail

/// Path of the JSON summary that accompanies a CSV table.
inline std::filesystem::path summary_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".json");
  return p;
}

/// Renders all output files for a config. CSV format yields the table plus
/// a JSON summary; JSON format yields one document that embeds the data.
inline std::vector<OutputFile> render_outputs(const config::ExperimentConfig& cfg,
                                              const RunOptions& opt = {}) {
  using config::OutputFormat;
  detail::Rendered r = std::visit(
      [&](const auto& p) -> detail::Rendered {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, config::CoinParams>) return detail::render_coin(p);
        else if constexpr (std::is_same_v<T, config::NSlitParams>) return detail::render_nslit(p, opt);
        else if constexpr (std::is_same_v<T, config::SorkinParams>) return detail::render_sorkin(p);
        else if constexpr (std::is_same_v<T, config::DelayedParams>) return detail::render_delayed(p);
        else return detail::render_freq(p, opt);
      },
      cfg.params);

  detail::Json doc;
  doc["experiment"] = std::string(config::experiment_name(cfg.experiment()));
  if (opt.timestamp) doc["generated_at"] = detail::utc_timestamp();
  std::vector<OutputFile> files;
  if (cfg.format == OutputFormat::csv) {
    // Bulk arrays live in the CSV; the summary keeps only aggregates.
    r.summary.erase("profile");
    r.summary.erase("table");
    doc.update(r.summary);
    files.push_back({cfg.output_path, r.csv});
    files.push_back({summary_path(cfg.output_path), doc.dump(2) + "\n"});
  } else {
    doc.update(r.summary);
    files.push_back({cfg.output_path, doc.dump(2) + "\n"});
  }
  return files;
}

inline void write_outputs(const std::vector<OutputFile>& files) {
  for (const auto& f : files) {
    std::ofstream out(f.path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open '" + f.path.string() + "' for writing");
    out << f.content;
    out.flush();
    if (!out) throw io_error("failed writing '" + f.path.string() + "'");
  }
}

}  // namespace dualprob
