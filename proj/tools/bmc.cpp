// bmc: command-line front end for the experiments.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <optional>

#include "bmc/error.hpp"
#include "bmc/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int exit_code(bmc::ErrorKind k) {
  switch (k) {
    case bmc::ErrorKind::Numerical: return kExitNumerical;
    default: return kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo estimation of moments of Banach-space-valued random variables"};
  app.require_subcommand(0, 1);
  app.set_version_flag("--version", BMC_VERSION);

  std::string config_path, out_dir = "out";
  std::optional<std::uint64_t> seed;
  bool print_schema = false;
  app.add_flag("--config-help", print_schema, "print every configuration key and exit");

  const char* kinds[][2] = {
      {"mc-rate", "standard MC error vs M (or strong error vs N_l with measure = strong)"},
      {"mlmc-run", "multilevel runs over an epsilon grid: achieved error and cost"},
      {"allocate", "level and sample allocation plans"},
      {"tensor-norm", "norms of a tensor given as JSON"},
      {"counterexample", "uniform-basis counterexample: pi- vs eps-norm errors"},
      {"property-suite", "empirical and exhaustive checks of the probabilistic inequalities"},
  };
  for (auto& k : kinds) {
    CLI::App* sub = app.add_subcommand(k[0], k[1]);
    sub->add_option("--config", config_path, "INI or JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "root seed (overrides [experiment] seed)");
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  if (print_schema) {
    std::cout << bmc::config_help();
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kExitConfig;
  }

  try {
    bmc::ExperimentConfig cfg = config_path.empty() ? bmc::ExperimentConfig() : bmc::ExperimentConfig::load(config_path);
    cfg.set("experiment", "kind", app.get_subcommands().front()->get_name());
    if (seed) cfg.set("experiment", "seed", std::to_string(*seed));
    bmc::RunSummary s = bmc::run_experiment(cfg, out_dir);
    for (const auto& f : s.files) std::cout << out_dir << "/" << f << "\n";
    if (!s.pass) {
      std::cerr << "some checks failed, see " << out_dir << "/property_suite.json\n";
      return 1;
    }
    return 0;
  } catch (const bmc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
