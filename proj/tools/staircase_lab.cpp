// staircase-lab <command> --config <file> [--out <dir>] [--key value ...]

#include "staircase/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kConfigError = 1;
constexpr int kNumericalError = 2;

}  // namespace

int main(int argc, char** argv) {
  using namespace staircase;

  CLI::App app{"Gaussian-filtered spectral staircases and their ITQDE estimators"};
  app.allow_extras();
  std::string command;
  std::string config_path;
  std::string out_dir;
  std::string window;
  double delta_lambda = -1.0;
  app.add_option("command", command, "staircase | collapse | sample-sweep | smooth | stability | model-info")
      ->required()
      ->check(CLI::IsMember(command_names()));
  app.add_option("--config", config_path, "key = value config file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (default runs/<command>-<time>-<hash>)");
  app.add_option("--window", window, "smoothing window")->check(CLI::IsMember({"gaussian", "boxcar"}));
  app.add_option("--delta-lambda", delta_lambda, "smoothing width");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  try {
    Config cfg = Config::load(config_path);
    // leftover arguments are --key value overrides
    const auto extras = app.remaining();
    for (std::size_t i = 0; i < extras.size(); ++i) {
      const std::string& arg = extras[i];
      if (arg.rfind("--", 0) != 0 || arg.size() < 3) {
        throw ConfigError("unexpected argument '" + arg + "'");
      }
      std::string key = arg.substr(2);
      std::string value;
      const auto eq = key.find('=');
      if (eq != std::string::npos) {
        value = key.substr(eq + 1);
        key.resize(eq);
      } else {
        if (i + 1 >= extras.size()) {
          throw ConfigError("override --" + key + " has no value");
        }
        value = extras[++i];
      }
      cfg.set(key, value);
    }
    if (!window.empty()) {
      cfg.set_json("smoothing.window", window);
    }
    if (delta_lambda >= 0.0) {
      cfg.set_json("smoothing.delta_lambda", delta_lambda);
    }
    const std::filesystem::path dir = out_dir.empty() ? default_run_dir(command, cfg) : std::filesystem::path(out_dir);
    const auto files = run_command(command, cfg, dir);
    std::cout << "wrote " << files.size() << " file(s) to " << dir.string() << "\n";
    return 0;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  }
}
