#include "dualprob/config.hpp"

#include <random>
#include <string>

#include <gtest/gtest.h>

using namespace dualprob::config;

namespace {

ConfigError parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "expected a ConfigError for:\n" << text;
  return ConfigError(0, "", "none");
}

const char* kGeometry =
    "wavelength_nm = 500\n"
    "slit_positions_um = -5, 5\n"
    "screen_plane_x = 1\n";

}  // namespace

TEST(ParseConfig, MinimalFairCoin) {
  const auto cfg = parse_config("experiment = coin\noutput = c.json\nweights = 1,1\nlabels = h,t\n");
  EXPECT_EQ(cfg.experiment(), Experiment::coin);
  EXPECT_EQ(cfg.format, OutputFormat::json);
  const auto& p = std::get<CoinParams>(cfg.params);
  EXPECT_EQ(p.weights, (std::vector<double>{1, 1}));
  EXPECT_EQ(p.labels, (std::vector<std::string>{"h", "t"}));
}

TEST(ParseConfig, UnitSuffixesConvertToMeters) {
  const auto cfg = parse_config(std::string("experiment = nslit\noutput = p.csv\n") + kGeometry +
                                "y_min_mm = -100\ny_max_mm = 100\nn_points = 3\n");
  const auto& p = std::get<NSlitParams>(cfg.params);
  EXPECT_EQ(p.geometry.wavelength, 5e-7);
  EXPECT_EQ(p.geometry.slit_positions, (std::vector<double>{-5e-6, 5e-6}));
  EXPECT_EQ(p.scan.y_min, -0.1);
  EXPECT_EQ(p.scan.y_max, 0.1);
  EXPECT_EQ(p.geometry.source_x, -1.0);
  EXPECT_EQ(p.geometry.transmissions, (std::vector<double>{1, 1}));
  EXPECT_EQ(p.open_slits, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(cfg.format, OutputFormat::csv);
}

TEST(ParseConfig, NegativeWavelengthNamesKey) {
  const auto e = parse_error(
      "experiment = nslit\noutput = p.csv\nwavelength = -1\nslit_positions = 0\n"
      "screen_plane_x = 1\ny_min = -1\ny_max = 1\nn_points = 5\n");
  EXPECT_EQ(e.key(), "wavelength");
  EXPECT_EQ(e.line(), 3u);
  EXPECT_NE(std::string(e.what()).find("wavelength"), std::string::npos);
}

TEST(ParseConfig, DuplicateSlitOffsetsCiteMonotonicity) {
  const auto e = parse_error(
      "experiment = nslit\noutput = p.csv\nwavelength_nm = 500\nslit_positions_um = 1, 1\n"
      "screen_plane_x = 1\ny_min = -1\ny_max = 1\nn_points = 5\n");
  EXPECT_EQ(e.key(), "slit_positions");
  EXPECT_EQ(e.line(), 4u);
  EXPECT_NE(std::string(e.what()).find("strictly increasing"), std::string::npos);
}

TEST(ParseConfig, LocatedErrors) {
  EXPECT_EQ(parse_error("experiment = coin\noutput = c.json\nweights = 1,1\n").key(), "labels");
  EXPECT_EQ(parse_error("experiment = coin\noutput = c.json\nweights = 1,1\n").line(), 0u);
  const auto unknown = parse_error("experiment = coin\n\n# hi\nfoo = 1\n");
  EXPECT_EQ(unknown.key(), "foo");
  EXPECT_EQ(unknown.line(), 4u);
  const auto dup = parse_error("experiment = coin\nexperiment = coin\n");
  EXPECT_EQ(dup.line(), 2u);
  const auto type = parse_error("experiment = coin\noutput = c.json\nweights = 1,x\nlabels = a,b\n");
  EXPECT_EQ(type.key(), "weights");
  EXPECT_EQ(type.line(), 3u);
  EXPECT_EQ(parse_error("experiment = coin\noutput = c.json\nweights = 1,,1\nlabels = a,b,c\n").key(),
            "weights");
  EXPECT_EQ(parse_error("experiment = coin\nn_points = 4\n").key(), "n_points");
  EXPECT_EQ(parse_error("experiment = coin\noutput = c.json\nweights = 1,1\nlabels = a,b\n"
                        "format = yaml\n").key(),
            "format");
  EXPECT_EQ(parse_error("experiment = coin\nweights_nm = 1\n").key(), "weights_nm");
  EXPECT_EQ(parse_error("experiment = coin\noutput = c.json\nformat = csv\n").key(), "output");
}

TEST(ParseConfig, ExperimentSpecificPreconditions) {
  const std::string head = "experiment = sorkin\noutput = s.csv\n";
  EXPECT_EQ(parse_error(head + kGeometry + "y_min = 0\ny_max = 1\nn_points = 4\n").key(),
            "slit_positions");
  const std::string three =
      "wavelength_nm = 500\nslit_positions_um = -5, 0, 5\nscreen_plane_x = 1\n";
  EXPECT_EQ(parse_error(head + three + "y_min = 1\ny_max = 1\nn_points = 4\n").key(), "y_max");
  EXPECT_EQ(parse_error(head + three + "y_min = 0\ny_max = 1\nn_points = 4\ntriple = 0,1\n").key(),
            "triple");
  EXPECT_EQ(parse_error(head + three + "y_min = 0\ny_max = 1\nn_points = 4\ntriple = 0,1,1\n").key(),
            "triple");
  EXPECT_EQ(parse_error(head + three + "y_min = 0\ny_max = 1\nn_points = 4\ntransmissions = 1\n")
                .key(),
            "transmissions");
  EXPECT_EQ(parse_error(std::string("experiment = delayed\noutput = d.json\n") + kGeometry +
                        "slit_plane_x = 2\ndetectors = 0, 0\n")
                .key(),
            "screen_plane_x");
  EXPECT_EQ(parse_error("experiment = freq\noutput = f.csv\nweights = 1\nlabels = a\n"
                        "schedule = 10, 5\nseed = 1\n")
                .key(),
            "schedule");
  EXPECT_EQ(parse_error("experiment = freq\noutput = f.csv\nweights = 1\nlabels = a\n"
                        "schedule = 10\nseed = -1\n")
                .key(),
            "seed");
}

TEST(RenderConfig, RoundTripsRandomConfigs) {
  std::mt19937_64 gen(51);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> small(1, 6);
  auto geometry = [&](std::size_t n) {
    GeometryParams g;
    g.wavelength = 1e-7 + unit(gen) * 1e-6;
    double y = -unit(gen) * 1e-4;
    for (std::size_t i = 0; i < n; ++i) {
      g.slit_positions.push_back(y);
      y += 1e-7 + unit(gen) * 1e-5;
    }
    g.slit_plane_x = unit(gen) - 0.5;
    g.screen_plane_x = g.slit_plane_x + 0.01 + unit(gen);
    g.source_x = g.slit_plane_x - 0.01 - unit(gen);
    g.source_y = (unit(gen) - 0.5) * 1e-3;
    for (std::size_t i = 0; i < n; ++i) g.transmissions.push_back(unit(gen));
    return g;
  };
  auto scan = [&] {
    ScreenScan s{-unit(gen), unit(gen) + 1e-3, static_cast<std::size_t>(2 + small(gen) * 100)};
    return s;
  };
  for (int k = 0; k < 500; ++k) {
    ExperimentConfig cfg;
    cfg.output_path = "out/run_" + std::to_string(k) + ((k % 2) ? ".csv" : ".dat");
    cfg.format = (k % 3) ? OutputFormat::csv : OutputFormat::json;
    const std::size_t n = static_cast<std::size_t>(small(gen));
    std::vector<std::string> labels;
    std::vector<double> weights;
    for (std::size_t i = 0; i < n; ++i) {
      labels.push_back("L" + std::to_string(i));
      weights.push_back(unit(gen) + 1e-9);
    }
    switch (k % 5) {
      case 0:
        cfg.params = CoinParams{weights, labels};
        break;
      case 1: {
        NSlitParams p{geometry(n), scan(), {}};
        for (std::size_t i = 0; i < n; i += 2) p.open_slits.push_back(i);
        cfg.params = p;
        break;
      }
      case 2:
        cfg.params = SorkinParams{geometry(n + 2), scan(), {2, 0, 1}};
        break;
      case 3: {
        DelayedParams p{geometry(n), {}};
        for (std::size_t i = 0; i < n; ++i) p.detectors.push_back(unit(gen) - 0.5);
        cfg.params = p;
        break;
      }
      default:
        cfg.params = FreqParams{weights, labels, {1, 10, 10 + gen() % 1000}, gen(), unit(gen) * 6};
    }
    const auto text = render_config(cfg);
    ExperimentConfig back;
    ASSERT_NO_THROW(back = parse_config(text)) << text;
    ASSERT_EQ(back, cfg) << text;
    ASSERT_EQ(render_config(back), text);
  }
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(5e-7), "5e-07");
  EXPECT_EQ(format_double(-0.05), "-0.05");
  std::mt19937_64 gen(52);
  for (int k = 0; k < 1000; ++k) {
    const double v = std::ldexp(static_cast<double>(gen() >> 11), -static_cast<int>(gen() % 80));
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}
