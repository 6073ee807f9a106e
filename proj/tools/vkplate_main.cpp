// Command-line front end: spectrum, solve, sweep, verify.
//
// Precedence: built-in defaults, then --config file, then --set pairs, then
// the dedicated flags.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vkplate/cli.hpp"

namespace {

std::string key_help() {
  std::ostringstream os;
  os << "Configuration keys (file lines \"key = value\" or --set key=value):\n";
  for (const auto& [k, h] : vkplate::config_keys()) os << "  " << k << ": " << h << '\n';
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibria of a partially hinged buckled plate with nonlinear hangers"};
  app.require_subcommand(1);
  app.fallthrough();
  app.footer(key_help());

  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::string> out, lam, lam_from, lam_to, only;
  std::optional<std::uint64_t> seed;
  std::optional<int> M, N, steps;
  std::optional<double> lam_max;

  app.add_option("--config", config_path, "configuration file of key = value lines");
  app.add_option("--set", sets, "override one key, e.g. --set k=0.1 (repeatable)");
  app.add_option("--out", out, "output directory");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--M", M, "number of sine modes in x");
  app.add_option("--N", N, "polynomial degree + 1 in y");
  app.add_option("--lam", lam, "buckling load: number or e.g. 1.05*lambda1");

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues and eigenmodes below lam-max");
  spectrum->add_option("--lam-max", lam_max, "upper end of the enumeration");
  auto* solve = app.add_subcommand("solve", "equilibria at one lambda with stability tags");
  auto* sweep = app.add_subcommand("sweep", "continuation in lambda with bifurcation detection");
  sweep->add_option("--steps", steps, "number of lambda values");
  sweep->add_option("--lam-from", lam_from, "first lambda");
  sweep->add_option("--lam-to", lam_to, "last lambda");
  auto* verify = app.add_subcommand("verify", "property suites, one PASS/FAIL line each");
  verify->add_option("--only", only, "run a single suite");
  (void)solve;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : vkplate::kExitConfigError;
  }

  vkplate::RunConfig rc;
  try {
    if (!config_path.empty()) vkplate::load_config_file(rc, config_path);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw vkplate::ConfigError("--set expects key=value, got '" + s + "'");
      vkplate::set_config_value(rc, s.substr(0, eq), s.substr(eq + 1));
    }
    auto apply = [&](const char* key, const auto& opt) {
      if (!opt) return;
      std::ostringstream os;
      os.precision(17);
      os << *opt;
      vkplate::set_config_value(rc, key, os.str());
    };
    apply("out", out);
    apply("seed", seed);
    apply("M", M);
    apply("N", N);
    apply("lambda", lam);
    apply("lam_max", lam_max);
    apply("steps", steps);
    apply("lam_from", lam_from);
    apply("lam_to", lam_to);
    apply("only", only);
  } catch (const vkplate::ParameterError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return vkplate::kExitConfigError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  return vkplate::run_command(command, rc, std::cout, std::cerr);
}
