#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "amber/aggregation.hpp"
#include "amber/metrics.hpp"

namespace amber {

/// Everything one CLI invocation needs. Paths are used as given; output
/// content never depends on the wall clock or locale.
struct PipelineConfig {
  std::string command;  // validate | aggregate | qa-rank | convert | divergence | report
  std::vector<std::string> inputs;
  std::string scheme_path;
  std::string segments_path;
  std::string output_path;

  // aggregate
  std::string family = "gaussian";  // empirical | gaussian | gmm | weighted-mean
  std::size_t components = 2;
  std::string delay = "0";  // seconds, or "auto"
  std::string reference;    // reference trace for --delay auto
  bool normalize = false;

  // qa-rank
  double threshold = 0.05;
  double agreement = 1.0;

  // qa-rank / convert
  std::string attribute;
  std::string map_spec;  // convert: "low=-1,medium=0,high=1"

  // divergence
  std::string method = "kl";

  std::uint64_t seed = 0;
  int format_version = 1;
};

/// Checks paths and numeric ranges; Error(InvalidArgument) on the first
/// problem.
void validate_config(const PipelineConfig& config);

/// Canonical JSON of the config, hashed (FNV-1a 64, hex) into reports.
std::string config_hash(const PipelineConfig& config);

struct PipelineResult {
  std::string output;  // JSON document, or CSV for convert
  int exit_code = 0;   // 1 when validate finds violations
};

/// Runs one subcommand. Module errors propagate as amber::Error with the
/// subcommand prefixed to the message.
PipelineResult run_pipeline(const PipelineConfig& config);

}  // namespace amber
