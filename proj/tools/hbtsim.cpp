#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hbt/commands.hpp"
#include "hbt/config.hpp"
#include "hbt/coulomb.hpp"
#include "hbt/output.hpp"
#include "hbt/verify.hpp"

namespace {

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string timestamp;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config = true) {
  auto* cfg = cmd->add_option("--config", c.config, "run configuration (key-value file or manifest .json)");
  if (needs_config) cfg->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "output path stem; suffixes such as .csv are appended");
  cmd->add_option("--seed", c.seed, "overrides the configuration seed");
  cmd->add_option("--threads", c.threads, "worker threads (output does not depend on this)")
      ->check(CLI::Range(1u, 1024u));
  cmd->add_option("--timestamp", c.timestamp, "manifest timestamp (default: current UTC time)");
}

hbt::RunConfig load(const Common& c) {
  auto cfg = hbt::load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  return cfg;
}

hbt::cli::RunOptions run_options(const Common& c) {
  return {c.out, c.threads, c.timestamp};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-tip electron intensity interferometry simulator"};
  app.set_version_flag("--version", std::string(hbt::output::kToolVersion));
  app.require_subcommand(1);

  Common closed, coul, compose, sweep, oracle, verify_common;

  auto* c_closed = app.add_subcommand("closed-form", "far-field correlator curves over the phase grid");
  add_common(c_closed, closed);

  auto* c_coulomb = app.add_subcommand("coulomb", "relative Coulomb trajectory and dip width");
  add_common(c_coulomb, coul);

  auto* c_compose = app.add_subcommand("compose", "screen pattern with the Coulomb dip");
  add_common(c_compose, compose);

  auto* c_sweep = app.add_subcommand("sweep", "derived quantities over one parameter");
  add_common(c_sweep, sweep);
  std::string param;
  std::vector<double> values;
  c_sweep->add_option("--param", param, "d, k, D or mu (default: sweep.parameter)");
  c_sweep->add_option("--values", values, "comma-separated values (default: sweep.values)")
      ->delimiter(',');

  auto* c_oracle = app.add_subcommand("oracle", "Fock-space engine against the closed form");
  add_common(c_oracle, oracle);

  auto* c_verify = app.add_subcommand("verify", "run verification suites");
  std::string suite = "all";
  std::string mutate;
  c_verify->add_option("suite", suite, "fock, closed-form, coulomb or all")
      ->check(CLI::IsMember({"fock", "closed-form", "coulomb", "all"}));
  c_verify->add_option("--mutate", mutate, "inject a defect: exchange-sign")
      ->check(CLI::IsMember({"exchange-sign"}));
  c_verify->add_option("--out", verify_common.out, "write <out>.verify.json");
  c_verify->add_option("--threads", verify_common.threads, "worker threads")
      ->check(CLI::Range(1u, 1024u));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return hbt::cli::kValidationError;
  }

  try {
    hbt::cli::CommandResult result;
    if (c_closed->parsed()) {
      result = hbt::cli::cmd_closed_form(load(closed), run_options(closed));
    } else if (c_coulomb->parsed()) {
      result = hbt::cli::cmd_coulomb(load(coul), run_options(coul));
    } else if (c_compose->parsed()) {
      result = hbt::cli::cmd_compose(load(compose), run_options(compose));
    } else if (c_sweep->parsed()) {
      const auto cfg = load(sweep);
      if (param.empty() && cfg.sweep_parameter) param = *cfg.sweep_parameter;
      if (values.empty()) values = cfg.sweep_values;
      if (param.empty()) throw std::invalid_argument("sweep: no parameter given");
      result = hbt::cli::cmd_sweep(cfg, param, values, run_options(sweep));
    } else if (c_oracle->parsed()) {
      result = hbt::cli::cmd_oracle(load(oracle), run_options(oracle));
    } else {
      hbt::verify::Options vopt;
      vopt.mutate_exchange_sign = mutate == "exchange-sign";
      vopt.threads = verify_common.threads;
      result = hbt::cli::cmd_verify(hbt::verify::parse_suite(suite), vopt,
                                    run_options(verify_common));
    }
    for (const auto& f : result.files) std::cerr << "wrote " << f.string() << "\n";
    std::cerr << result.summary << "\n";
    return result.exit_code;
  } catch (const hbt::coulomb::NonConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hbt::cli::kNonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hbt::cli::kValidationError;
  }
}
