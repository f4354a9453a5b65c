#pragma once

// Command-line front end:
//   dualprob run --config <path> [--out <path>] [--no-timestamp] [--threads N]
//   dualprob validate --config <path>
// Exit codes: 0 ok, 2 config/usage, 3 output I/O, 4 internal invariant.

#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "dualprob/config.hpp"
#include "dualprob/errors.hpp"
#include "dualprob/run.hpp"

namespace dualprob::cli {

inline std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline int run_command(int argc, const char* const* argv, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
  CLI::App app{"Complex-amplitude probability experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  bool no_timestamp = false;
  unsigned threads = 1;

  auto* run = app.add_subcommand("run", "Run an experiment and write its outputs");
  run->add_option("--config", config_path, "Experiment configuration file")->required();
  run->add_option("--out", out_path, "Override the configured output path");
  run->add_flag("--no-timestamp", no_timestamp, "Omit generated_at from JSON output");
  run->add_option("--threads", threads, "Worker threads for profile and trial evaluation")
      ->check(CLI::Range(1u, 256u));

  auto* validate = app.add_subcommand("validate", "Parse and check a configuration only");
  validate->add_option("--config", config_path, "Experiment configuration file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  const auto text = read_file(config_path);
  if (!text) {
    err << "error: cannot read config '" << config_path << "'\n";
    return kExitConfig;
  }
  config::ExperimentConfig cfg;
  try {
    cfg = config::parse_config(*text);
  } catch (const config::ConfigError& e) {
    err << config_path << ": " << e.what() << '\n';
    return kExitConfig;
  }

  if (validate->parsed()) {
    out << config_path << ": ok (" << config::experiment_name(cfg.experiment()) << ")\n";
    return kExitOk;
  }

  if (!out_path.empty()) cfg.output_path = out_path;
  if (cfg.format == config::OutputFormat::csv && cfg.output_path.extension() == ".json") {
    err << "error: csv output path must not end in .json\n";
    return kExitConfig;
  }
  try {
    const auto files = render_outputs(cfg, {.timestamp = !no_timestamp, .workers = threads});
    write_outputs(files);
    for (const auto& f : files) out << "wrote " << f.path.string() << '\n';
  } catch (const io_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    // Config passed validation, so anything thrown by the engine is ours.
    err << "internal error: " << e.what() << '\n';
    return kExitInvariant;
  }
  return kExitOk;
}

}  // namespace dualprob::cli
