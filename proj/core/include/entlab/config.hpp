#pragma once

// Run configuration for the CLI: one schema, two encodings.  The native form
// is sectioned key = value text ('#' or ';' comment lines); the same section
// and key names are also accepted as a JSON object of objects.  Parse errors
// carry line (text) or path (JSON) diagnostics; validation returns a list of
// diagnostics instead of throwing.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "entlab/experiments.hpp"
#include "entlab/theory.hpp"

namespace entlab {

enum class experiment_kind { sweep, fit_d, fss, cutscan, theory, oracle_check };

const char* experiment_name(experiment_kind k);
experiment_kind experiment_from_name(const std::string& name);

/// Prediction-curve run: constants are either given or, when left at 0,
/// calibrated from an ergodic Monte Carlo run at the same sizes.
struct theory_run_config {
  int l_a = 8;
  int l_b = 8;
  double gamma = 1.0;
  double beta = 2.0;
  d_model d1{1.0, 0.0};
  d_model d2{1.0, 0.0};
  double tau1 = 0.0;         // relaxation rate for the R0 curve; 0: 1/D_1
  double tau2 = 0.0;         // rate for the participation curve; 0: 1/D_2
  double r0_infinity = 0.0;  // 0: calibrate
  double q_infinity = 0.0;   // 0: calibrate
  long long calib_samples = 400;
  double lambda_lo = 1.05;
  double lambda_hi = 1e6;
  int n_points = 120;
  bool eq16_variant = false;
};

struct oracle_config {
  long long trials = 200;
  double tol = 1e-10;
};

struct run_config {
  experiment_kind kind = experiment_kind::sweep;
  bool kind_explicit = false;  // true when the config names the experiment
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  int workers = 0;   // 0: ENTLAB_WORKERS env var, then hardware count
  int log_base = 0;  // 0: natural logs; 2: entropy columns in bits
  bool dump_samples = false;

  sweep_config sweep;
  dscaling_config fitd;
  fss_config fss;
  cutscan_config cut;
  theory_run_config theory;
  oracle_config oracle;

  // Optional explicit ensemble parameters (unset when NaN).  They do not
  // drive the sweeps, whose parameters are solved from Lambda targets; they
  // give validation a concrete profile to scan for singular terms.
  double explicit_mu = std::numeric_limits<double>::quiet_NaN();
  double explicit_w = std::numeric_limits<double>::quiet_NaN();
  double explicit_w_s = std::numeric_limits<double>::quiet_NaN();

  std::vector<std::string> sections_seen;
  std::string source_path;
  std::string source_text;  // raw config bytes, echoed into the manifest
};

struct diagnostic {
  enum class level { error, warning };
  level severity = level::error;
  std::string field;  // section.key path
  std::string message;
};

struct validation_report {
  std::vector<diagnostic> items;
  bool ok() const;  // true iff no error-severity items
  std::vector<std::string> errors() const;
  std::vector<std::string> warnings() const;
};

/// Parses either encoding (JSON when the first non-space byte is '{');
/// `name` labels diagnostics, normally the file path.  Throws config_error.
run_config parse_config(const std::string& text, const std::string& name);

/// Reads and parses a config file.  Throws io_error / config_error.
run_config load_config(const std::string& path);

/// Copies run-level seed / workers and the shared ensemble settings into the
/// per-experiment sub-configs.  Called by parse_config; call again after
/// overriding seed, workers, or ensemble fields.
void propagate(run_config& cfg);

validation_report validate(const run_config& cfg);

}  // namespace entlab
