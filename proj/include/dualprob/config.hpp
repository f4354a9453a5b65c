#pragma once

// Flat experiment configuration: one `key = value` per line, `#` starts a
// comment, lists are comma separated. Length keys also accept the suffixes
// _nm, _um and _mm and are stored in meters.
//
// Every library precondition is checked here, so a config that parses can
// be run without further validation.

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "dualprob/slit_sim.hpp"

namespace dualprob::config {

enum class Experiment { coin, nslit, sorkin, delayed, freq };
enum class OutputFormat { csv, json };

struct CoinParams {
  std::vector<double> weights;
  std::vector<std::string> labels;

  friend bool operator==(const CoinParams&, const CoinParams&) = default;
};

struct GeometryParams {
  double wavelength = 0.0;
  std::vector<double> slit_positions;
  double slit_plane_x = 0.0;
  double screen_plane_x = 0.0;
  double source_x = 0.0;
  double source_y = 0.0;
  std::vector<double> transmissions;

  [[nodiscard]] SlitGeometry build() const {
    return {{source_x, source_y}, slit_positions, slit_plane_x, screen_plane_x, wavelength,
            transmissions};
  }

  friend bool operator==(const GeometryParams&, const GeometryParams&) = default;
};

struct ScreenScan {
  double y_min = 0.0;
  double y_max = 0.0;
  std::size_t n_points = 0;

  friend bool operator==(const ScreenScan&, const ScreenScan&) = default;
};

struct NSlitParams {
  GeometryParams geometry;
  ScreenScan scan;
  std::vector<std::size_t> open_slits;

  friend bool operator==(const NSlitParams&, const NSlitParams&) = default;
};

struct SorkinParams {
  GeometryParams geometry;
  ScreenScan scan;
  std::array<std::size_t, 3> triple{0, 1, 2};

  friend bool operator==(const SorkinParams&, const SorkinParams&) = default;
};

struct DelayedParams {
  GeometryParams geometry;
  std::vector<double> detectors;

  friend bool operator==(const DelayedParams&, const DelayedParams&) = default;
};

struct FreqParams {
  std::vector<double> weights;
  std::vector<std::string> labels;
  std::vector<std::uint64_t> schedule;
  std::uint64_t seed = 0;
  double phase = 0.0;

  friend bool operator==(const FreqParams&, const FreqParams&) = default;
};

using ExperimentParams =
    std::variant<CoinParams, NSlitParams, SorkinParams, DelayedParams, FreqParams>;

struct ExperimentConfig {
  ExperimentParams params;
  std::filesystem::path output_path;
  OutputFormat format = OutputFormat::csv;

  [[nodiscard]] Experiment experiment() const { return static_cast<Experiment>(params.index()); }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parse failure with its location. line() is 0 when the problem is a
/// missing key rather than a particular line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, std::string key, const std::string& what)
      : std::runtime_error(format(line, key, what)), line_(line), key_(std::move(key)) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  [[nodiscard]] const std::string& key() const noexcept { return key_; }

 private:
  static std::string format(std::size_t line, const std::string& key, const std::string& what) {
    std::string s = line ? "line " + std::to_string(line) + ": " : std::string{};
    if (!key.empty()) s += "key '" + key + "': ";
    return s + what;
  }

  std::size_t line_;
  std::string key_;
};

inline constexpr std::string_view experiment_name(Experiment e) {
  constexpr std::array<std::string_view, 5> names{"coin", "nslit", "sorkin", "delayed", "freq"};
  return names[static_cast<std::size_t>(e)];
}

inline constexpr std::string_view format_name(OutputFormat f) {
  return f == OutputFormat::csv ? "csv" : "json";
}

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), end};
}

namespace detail {

enum class Kind { text, text_list, real, real_list, length, length_list, count, count_list };

struct KeySpec {
  std::string_view name;
  Kind kind;
};

inline constexpr std::array<KeySpec, 21> kRegistry{{
    {"experiment", Kind::text},       {"output", Kind::text},
    {"format", Kind::text},           {"weights", Kind::real_list},
    {"labels", Kind::text_list},      {"wavelength", Kind::length},
    {"slit_positions", Kind::length_list}, {"slit_plane_x", Kind::length},
    {"screen_plane_x", Kind::length}, {"source_x", Kind::length},
    {"source_y", Kind::length},       {"transmissions", Kind::real_list},
    {"y_min", Kind::length},          {"y_max", Kind::length},
    {"n_points", Kind::count},        {"open_slits", Kind::count_list},
    {"triple", Kind::count_list},     {"detectors", Kind::length_list},
    {"schedule", Kind::count_list},   {"seed", Kind::count},
    {"phase", Kind::real},
}};

inline const std::map<Experiment, std::set<std::string_view>>& allowed_keys() {
  static const std::map<Experiment, std::set<std::string_view>> table = [] {
    const std::set<std::string_view> common{"experiment", "output", "format"};
    const std::set<std::string_view> geom{"wavelength", "slit_positions", "slit_plane_x",
                                          "screen_plane_x", "source_x", "source_y",
                                          "transmissions"};
    auto join = [](std::initializer_list<std::set<std::string_view>> parts) {
      std::set<std::string_view> out;
      for (const auto& p : parts) out.insert(p.begin(), p.end());
      return out;
    };
    return std::map<Experiment, std::set<std::string_view>>{
        {Experiment::coin, join({common, {"weights", "labels"}})},
        {Experiment::freq, join({common, {"weights", "labels", "schedule", "seed", "phase"}})},
        {Experiment::nslit, join({common, geom, {"y_min", "y_max", "n_points", "open_slits"}})},
        {Experiment::sorkin, join({common, geom, {"y_min", "y_max", "n_points", "triple"}})},
        {Experiment::delayed, join({common, geom, {"detectors"}})},
    };
  }();
  return table;
}

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct RawValue {
  std::string text;
  std::size_t line = 0;
  double unit = 1.0;  // divisor from a unit suffix
};

struct UnitSuffix {
  std::string_view suffix;
  double divisor;
};
inline constexpr std::array<UnitSuffix, 3> kSuffixes{{{"_nm", 1e9}, {"_um", 1e6}, {"_mm", 1e3}}};

inline const KeySpec* find_spec(std::string_view name) {
  for (const auto& k : kRegistry) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

class Reader {
 public:
  explicit Reader(std::map<std::string, RawValue> raw) : raw_(std::move(raw)) {}

  [[nodiscard]] bool has(const std::string& key) const { return raw_.contains(key); }
  [[nodiscard]] std::size_t line(const std::string& key) const {
    const auto it = raw_.find(key);
    return it == raw_.end() ? 0 : it->second.line;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(line(key), key, what);
  }

  [[nodiscard]] const RawValue& require(const std::string& key) const {
    const auto it = raw_.find(key);
    if (it == raw_.end()) throw ConfigError(0, key, "missing required key");
    return it->second;
  }

  [[nodiscard]] std::string text(const std::string& key) const { return require(key).text; }

  [[nodiscard]] std::vector<std::string> text_list(const std::string& key) const {
    std::vector<std::string> out;
    for (auto item : split(key, require(key).text)) out.emplace_back(item);
    return out;
  }

  [[nodiscard]] double real(const std::string& key) const {
    const auto& rv = require(key);
    return to_real(key, trim(rv.text)) / rv.unit;
  }

  [[nodiscard]] double real_or(const std::string& key, double fallback) const {
    return has(key) ? real(key) : fallback;
  }

  [[nodiscard]] std::vector<double> real_list(const std::string& key) const {
    const auto& rv = require(key);
    std::vector<double> out;
    for (auto item : split(key, rv.text)) out.push_back(to_real(key, item) / rv.unit);
    return out;
  }

  [[nodiscard]] std::uint64_t count(const std::string& key) const {
    return to_count(key, trim(require(key).text));
  }

  [[nodiscard]] std::vector<std::uint64_t> count_list(const std::string& key) const {
    std::vector<std::uint64_t> out;
    for (auto item : split(key, require(key).text)) out.push_back(to_count(key, item));
    return out;
  }

 private:
  std::vector<std::string_view> split(const std::string& key, std::string_view s) const {
    std::vector<std::string_view> items;
    while (true) {
      const auto comma = s.find(',');
      items.push_back(trim(s.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      s.remove_prefix(comma + 1);
    }
    for (auto item : items) {
      if (item.empty()) fail(key, "empty list element");
    }
    return items;
  }

  double to_real(const std::string& key, std::string_view s) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
      fail(key, "expected a real number, got '" + std::string(s) + "'");
    }
    if (!std::isfinite(v)) fail(key, "value must be finite");
    return v;
  }

  std::uint64_t to_count(const std::string& key, std::string_view s) const {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
      fail(key, "expected a non-negative integer, got '" + std::string(s) + "'");
    }
    return v;
  }

  std::map<std::string, RawValue> raw_;
};

inline void check_weights_labels(const Reader& r, const std::vector<double>& weights,
                                 const std::vector<std::string>& labels) {
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) r.fail("weights", "weights must be non-negative");
    sum += w;
  }
  if (!(sum > 0.0)) r.fail("weights", "at least one weight must be positive");
  if (labels.size() != weights.size()) {
    r.fail("labels", "expected " + std::to_string(weights.size()) + " labels to match weights");
  }
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) r.fail("labels", "duplicate label '" + l + "'");
  }
}

inline GeometryParams read_geometry(const Reader& r) {
  GeometryParams g;
  g.wavelength = r.real("wavelength");
  if (!(g.wavelength > 0.0)) r.fail("wavelength", "wavelength must be > 0");
  g.slit_positions = r.real_list("slit_positions");
  for (std::size_t i = 1; i < g.slit_positions.size(); ++i) {
    if (!(g.slit_positions[i] > g.slit_positions[i - 1])) {
      r.fail("slit_positions", "slit offsets must be strictly increasing (distinct, ascending)");
    }
  }
  g.slit_plane_x = r.real_or("slit_plane_x", 0.0);
  g.screen_plane_x = r.real("screen_plane_x");
  if (!(g.screen_plane_x > g.slit_plane_x)) {
    r.fail("screen_plane_x", "screen plane must lie beyond the slit plane");
  }
  g.source_x = r.real_or("source_x", g.slit_plane_x - 1.0);
  if (!(g.source_x < g.slit_plane_x)) r.fail("source_x", "source must lie before the slit plane");
  g.source_y = r.real_or("source_y", 0.0);
  if (r.has("transmissions")) {
    g.transmissions = r.real_list("transmissions");
    if (g.transmissions.size() != g.slit_positions.size()) {
      r.fail("transmissions", "need one transmission factor per slit");
    }
    for (double t : g.transmissions) {
      if (t < 0.0) r.fail("transmissions", "transmission factors must be >= 0");
    }
  } else {
    g.transmissions.assign(g.slit_positions.size(), 1.0);
  }
  return g;
}

inline ScreenScan read_scan(const Reader& r) {
  ScreenScan s;
  s.y_min = r.real("y_min");
  s.y_max = r.real("y_max");
  if (!(s.y_min < s.y_max)) r.fail("y_max", "y_max must exceed y_min");
  const auto n = r.count("n_points");
  if (n < 2) r.fail("n_points", "need at least 2 screen points");
  s.n_points = static_cast<std::size_t>(n);
  return s;
}

inline std::vector<std::size_t> read_indices(const Reader& r, const std::string& key,
                                             std::size_t slit_count) {
  std::vector<std::size_t> out;
  std::set<std::uint64_t> seen;
  for (auto i : r.count_list(key)) {
    if (i >= slit_count) {
      r.fail(key, "slit index " + std::to_string(i) + " out of range (" +
                      std::to_string(slit_count) + " slits)");
    }
    if (!seen.insert(i).second) r.fail(key, "slit index " + std::to_string(i) + " repeated");
    out.push_back(static_cast<std::size_t>(i));
  }
  return out;
}

}  // namespace detail

inline ExperimentConfig parse_config(std::string_view text) {
  using namespace detail;
  std::map<std::string, RawValue> raw;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(line_no, "", "expected 'key = value'");
    }
    std::string key{trim(view.substr(0, eq))};
    const std::string value{trim(view.substr(eq + 1))};
    if (key.empty()) throw ConfigError(line_no, "", "missing key before '='");
    if (value.empty()) throw ConfigError(line_no, key, "missing value");

    double unit = 1.0;
    if (!find_spec(key)) {
      for (const auto& [suffix, divisor] : kSuffixes) {
        if (key.size() > suffix.size() && key.ends_with(suffix)) {
          const std::string base = key.substr(0, key.size() - suffix.size());
          const auto* spec = find_spec(base);
          if (spec && (spec->kind == Kind::length || spec->kind == Kind::length_list)) {
            key = base;
            unit = divisor;
          }
          break;
        }
      }
    }
    if (!find_spec(key)) throw ConfigError(line_no, key, "unknown key");
    if (raw.contains(key)) {
      throw ConfigError(line_no, key,
                        "duplicate key (first set on line " + std::to_string(raw[key].line) + ")");
    }
    raw.emplace(key, RawValue{value, line_no, unit});
  }

  const Reader r(raw);
  const auto exp_text = r.text("experiment");
  std::optional<Experiment> exp;
  for (auto e : {Experiment::coin, Experiment::nslit, Experiment::sorkin, Experiment::delayed,
                 Experiment::freq}) {
    if (experiment_name(e) == exp_text) exp = e;
  }
  if (!exp) {
    r.fail("experiment", "unknown experiment '" + exp_text +
                             "' (expected coin, nslit, sorkin, delayed or freq)");
  }
  const auto& allowed = allowed_keys().at(*exp);
  for (const auto& [key, rv] : raw) {
    if (!allowed.contains(key)) {
      throw ConfigError(rv.line, key,
                        "not applicable to experiment '" + std::string(exp_text) + "'");
    }
  }

  ExperimentConfig cfg;
  cfg.output_path = r.text("output");
  const bool table_first = *exp == Experiment::nslit || *exp == Experiment::sorkin ||
                           *exp == Experiment::freq;
  cfg.format = table_first ? OutputFormat::csv : OutputFormat::json;
  if (r.has("format")) {
    const auto f = r.text("format");
    if (f == "csv") {
      cfg.format = OutputFormat::csv;
    } else if (f == "json") {
      cfg.format = OutputFormat::json;
    } else {
      r.fail("format", "expected csv or json, got '" + f + "'");
    }
  }
  if (cfg.format == OutputFormat::csv && cfg.output_path.extension() == ".json") {
    r.fail("output", "csv output path must not end in .json (the summary is written there)");
  }

  switch (*exp) {
    case Experiment::coin: {
      CoinParams p{r.real_list("weights"), r.text_list("labels")};
      check_weights_labels(r, p.weights, p.labels);
      cfg.params = std::move(p);
      break;
    }
    case Experiment::freq: {
      FreqParams p{r.real_list("weights"), r.text_list("labels"), r.count_list("schedule"),
                   r.count("seed"), r.real_or("phase", 0.0)};
      check_weights_labels(r, p.weights, p.labels);
      for (std::size_t k = 0; k < p.schedule.size(); ++k) {
        if (p.schedule[k] == 0) r.fail("schedule", "trial counts must be >= 1");
        if (k > 0 && p.schedule[k] <= p.schedule[k - 1]) {
          r.fail("schedule", "schedule must be strictly increasing");
        }
      }
      cfg.params = std::move(p);
      break;
    }
    case Experiment::nslit: {
      NSlitParams p;
      p.geometry = read_geometry(r);
      p.scan = read_scan(r);
      const auto n = p.geometry.slit_positions.size();
      if (r.has("open_slits")) {
        p.open_slits = read_indices(r, "open_slits", n);
      } else {
        for (std::size_t i = 0; i < n; ++i) p.open_slits.push_back(i);
      }
      cfg.params = std::move(p);
      break;
    }
    case Experiment::sorkin: {
      SorkinParams p;
      p.geometry = read_geometry(r);
      p.scan = read_scan(r);
      const auto n = p.geometry.slit_positions.size();
      if (n < 3) r.fail("slit_positions", "sorkin experiment needs at least 3 slits");
      if (r.has("triple")) {
        const auto idx = read_indices(r, "triple", n);
        if (idx.size() != 3) r.fail("triple", "need exactly three slit indices");
        p.triple = {idx[0], idx[1], idx[2]};
      }
      cfg.params = std::move(p);
      break;
    }
    case Experiment::delayed: {
      DelayedParams p;
      p.geometry = read_geometry(r);
      p.detectors = r.real_list("detectors");
      if (p.detectors.size() != p.geometry.slit_positions.size()) {
        r.fail("detectors", "need exactly one detector per slit (" +
                                std::to_string(p.geometry.slit_positions.size()) + ")");
      }
      cfg.params = std::move(p);
      break;
    }
  }
  return cfg;
}

/// Canonical text for a config: SI units, every defaulted key written out.
inline std::string render_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  auto reals = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
    return s;
  };
  auto counts = [](const auto& v) {
    std::string s;
    bool first = true;
    for (auto x : v) {
      s += (first ? "" : ", ") + std::to_string(x);
      first = false;
    }
    return s;
  };
  auto texts = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
    return s;
  };
  auto geometry = [&](const GeometryParams& g) {
    out << "wavelength = " << format_double(g.wavelength) << '\n'
        << "slit_positions = " << reals(g.slit_positions) << '\n'
        << "slit_plane_x = " << format_double(g.slit_plane_x) << '\n'
        << "screen_plane_x = " << format_double(g.screen_plane_x) << '\n'
        << "source_x = " << format_double(g.source_x) << '\n'
        << "source_y = " << format_double(g.source_y) << '\n'
        << "transmissions = " << reals(g.transmissions) << '\n';
  };
  auto scan = [&](const ScreenScan& s) {
    out << "y_min = " << format_double(s.y_min) << '\n'
        << "y_max = " << format_double(s.y_max) << '\n'
        << "n_points = " << s.n_points << '\n';
  };

  out << "experiment = " << experiment_name(cfg.experiment()) << '\n'
      << "output = " << cfg.output_path.string() << '\n'
      << "format = " << format_name(cfg.format) << '\n';
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CoinParams>) {
          out << "weights = " << reals(p.weights) << '\n' << "labels = " << texts(p.labels) << '\n';
        } else if constexpr (std::is_same_v<T, FreqParams>) {
          out << "weights = " << reals(p.weights) << '\n'
              << "labels = " << texts(p.labels) << '\n'
              << "schedule = " << counts(p.schedule) << '\n'
              << "seed = " << p.seed << '\n'
              << "phase = " << format_double(p.phase) << '\n';
        } else if constexpr (std::is_same_v<T, NSlitParams>) {
          geometry(p.geometry);
          scan(p.scan);
          out << "open_slits = " << counts(p.open_slits) << '\n';
        } else if constexpr (std::is_same_v<T, SorkinParams>) {
          geometry(p.geometry);
          scan(p.scan);
          out << "triple = " << counts(p.triple) << '\n';
        } else {
          geometry(p.geometry);
          out << "detectors = " << reals(p.detectors) << '\n';
        }
      },
      cfg.params);
  return out.str();
}

}  // namespace dualprob::config
