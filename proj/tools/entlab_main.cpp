// Command-line front end.  One subcommand per experiment; the config file
// carries everything else.  Exit codes: 0 success, 1 run failure or a failed
// oracle gate, 2 config or validation error.

#include <cstdint>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "entlab/config.hpp"
#include "entlab/csv.hpp"
#include "entlab/errors.hpp"
#include "entlab/runner.hpp"
#include "entlab/version.hpp"

int main(int argc, char** argv) try {
  CLI::App app{"gaussian bipartite entanglement laboratory"};
  app.set_version_flag("--version", std::string("entlab ") + entlab::version_string);
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  std::uint64_t seed = 0;
  int workers = 0;
  bool validate_only = false;

  const std::vector<std::pair<std::string, std::string>> subcommands = {
      {"sweep", "entropy sweep over the complexity parameter, with rescaling checks"},
      {"fit-d", "extract rescaling constants across subsystem sizes and fit their growth"},
      {"fss", "finite-size criticality: curve crossing, data collapse, bootstrap bands"},
      {"cutscan", "entropy versus bipartition cut at fixed complexity targets"},
      {"theory", "closed-form prediction curves from fitted rescaling constants"},
      {"oracle-check", "gate the closed-form complexity parameter against the generic route"},
  };
  for (const auto& [name, desc] : subcommands) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config_path, "config file, sectioned key=value text or JSON")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the run seed");
    sub->add_option("--workers", workers, "override the worker count (0 = auto)");
    sub->add_option("--output", output_dir, "override the output directory");
    sub->add_flag("--validate-only", validate_only, "check the config and exit without running");
  }
  CLI11_PARSE(app, argc, argv);

  CLI::App* picked = app.get_subcommands().front();
  entlab::run_config cfg = entlab::load_config(config_path);

  const entlab::experiment_kind kind = entlab::experiment_from_name(picked->get_name());
  if (cfg.kind_explicit && cfg.kind != kind)
    throw entlab::config_error(std::string("config names experiment '") +
                               entlab::experiment_name(cfg.kind) + "' but the subcommand is '" +
                               picked->get_name() + "'");
  cfg.kind = kind;
  if (picked->count("--seed") > 0) cfg.seed = seed;
  if (picked->count("--workers") > 0) cfg.workers = workers;
  if (picked->count("--output") > 0) cfg.output_dir = output_dir;
  entlab::propagate(cfg);

  if (validate_only) {
    const entlab::validation_report report = entlab::validate(cfg);
    for (const auto& d : report.items)
      std::cerr << (d.severity == entlab::diagnostic::level::error ? "error" : "warning") << ": "
                << d.field << ": " << d.message << "\n";
    std::cout << (report.ok() ? "config ok" : "config invalid") << "\n";
    return report.ok() ? 0 : 2;
  }

  const entlab::run_result result = entlab::run(cfg);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << picked->get_name() << " -> " << result.output_dir.string() << "\n";
  for (const auto& [key, value] : result.summary)
    std::cout << "  " << key << " = " << entlab::format_double(value) << "\n";
  return result.exit_code;
} catch (const entlab::config_error& e) {
  std::cerr << "config error: " << e.what() << "\n";
  return 2;
} catch (const std::exception& e) {
  std::cerr << "error: " << e.what() << "\n";
  return 1;
}
