// Command-line front end: fdia <command> [--config path] [--seed n] [--out dir] [--section.key value ...]
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fdia/pipeline.hpp"

namespace {

// Dotted overrides arrive as unparsed extras: `--train.epochs 10` or `--train.epochs=10`.
std::vector<std::pair<std::string, std::string>> dotted_overrides(const std::vector<std::string>& extras) {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& arg = extras[i];
    if (arg.rfind("--", 0) != 0 || arg.find('.') == std::string::npos)
      throw fdia::ConfigError("unexpected argument '" + arg + "'");
    const std::string body = arg.substr(2);
    if (const auto eq = body.find('='); eq != std::string::npos) {
      out.emplace_back(body.substr(0, eq), body.substr(eq + 1));
    } else if (i + 1 < extras.size()) {
      out.emplace_back(body, extras[++i]);
    } else {
      throw fdia::ConfigError("missing value for --" + body);
    }
  }
  return out;
}

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"False data injection detection with an adversarial autoencoder"};
  app.require_subcommand(1);
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  bool quiet = false;

  std::vector<std::string> names = fdia::command_names();
  names.push_back("show-config");
  for (const auto& name : names) {
    CLI::App* sub = app.add_subcommand(name);
    sub->allow_extras();
    sub->add_option("--config", config_path, "Experiment config file (section.key = value lines)");
    sub->add_option("--seed", seed, "Global seed; re-derives every component seed");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_flag("--quiet", quiet, "Suppress progress lines");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << one_line(e.what()) << '\n';
    return 2;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string command = chosen->get_name();
  try {
    fdia::ExperimentConfig config = config_path.empty() ? fdia::ExperimentConfig{}
                                                        : fdia::load_config(config_path);
    if (chosen->count("--seed") > 0) fdia::set_global_seed(config, seed);
    if (!out_dir.empty()) config.out_dir = out_dir;
    for (const auto& [key, value] : dotted_overrides(chosen->remaining()))
      fdia::apply_override(config, key, value);
    fdia::validate(config);
    if (command == "show-config") {
      std::cout << fdia::serialize_config(config);
      return 0;
    }
    const auto written = fdia::run_command(command, config, quiet ? nullptr : &std::cerr);
    for (const auto& p : written) std::cout << p.string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << command << ": " << one_line(e.what()) << '\n';
    return 1;
  }
}
