#pragma once

// Experiment orchestration: owns the output directory (lock file), dispatches
// to the experiment modules, serializes points.csv / derived.csv (and the
// optional samples.bin dump), and writes manifest.json last as the commit
// marker.  Reruns with the same config and seed produce byte-identical CSVs
// for any worker count.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "entlab/config.hpp"

namespace entlab {

struct run_result {
  std::filesystem::path output_dir;
  std::map<std::string, double> summary;       // headline figures of the run
  std::vector<std::string> warnings;           // skipped points and the like
  std::map<std::string, std::string> digests;  // artifact name -> sha256
  int exit_code = 0;  // 0: success; 1: a gate inside the run failed
};

/// Validates, locks the output directory, runs the configured experiment,
/// and writes all artifacts.  Throws config_error on validation errors,
/// io_error when the directory is unusable or already locked.
run_result run(const run_config& cfg);

}  // namespace entlab
