// amber: command-line front end for the ambiguity-aware label pipeline.
//
//   amber validate rep.json scheme.json
//   amber aggregate --family gmm --components 2 --delay auto --reference truth in.csv scheme.json -o out.json
//   amber qa-rank --segments segments.csv --threshold 0.05 --agreement 1.0 traces.csv -o ranking.json
//   amber convert --attribute intensity --map low=-1,medium=0,high=1 in.csv scheme.json -o out.csv
//   amber divergence true.json pred.json --method kl
//   amber report out.json ranking.json
//
// Verbosity follows AMBER_LOG (error|warn|info|debug).

#include <iostream>

#include <CLI11.hpp>

#include "amber/error.hpp"
#include "amber/pipeline.hpp"
#include "amber/serialization.hpp"
#include "amber/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Ambiguity-aware emotion label processing"};
  app.set_version_flag("--version", std::string(amber::kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  amber::PipelineConfig config;
  app.add_option("--seed", config.seed, "Seed for every random draw (EM restarts, Monte Carlo)");
  app.add_option("--format-version", config.format_version, "Artifact format version")->check(CLI::Range(1, 1));

  auto add_output = [&](CLI::App* sub) {
    sub->add_option("-o,--output", config.output_path, "Output file (stdout when omitted)");
  };

  auto* validate = app.add_subcommand("validate", "Check a representation against its scheme");
  validate->add_option("inputs", config.inputs, "rep.json scheme.json")->required()->expected(1, 2);
  validate->add_option("--scheme", config.scheme_path, "Scheme file (instead of the second positional)");
  add_output(validate);

  auto* aggregate = app.add_subcommand("aggregate", "Fit ambiguity functions to multi-annotator traces");
  aggregate->add_option("inputs", config.inputs, "traces.csv scheme.json")->required()->expected(1, 2);
  aggregate->add_option("--scheme", config.scheme_path, "Scheme file (instead of the second positional)");
  aggregate->add_option("--family", config.family, "empirical | gaussian | gmm | weighted-mean")
      ->check(CLI::IsMember({"empirical", "gaussian", "gmm", "weighted-mean"}));
  aggregate->add_option("--components", config.components, "Mixture components for --family gmm")
      ->check(CLI::PositiveNumber);
  aggregate->add_option("--delay", config.delay, "Static reaction lag in seconds, or 'auto'");
  aggregate->add_option("--reference", config.reference, "Annotator id of the reference signal for --delay auto");
  aggregate->add_flag("--normalize", config.normalize, "Affine mean/variance normalization per annotator");
  add_output(aggregate);

  auto* qa = app.add_subcommand("qa-rank", "Qualitative-agreement ranking of segments");
  qa->add_option("inputs", config.inputs, "traces.csv")->required()->expected(1);
  qa->add_option("--segments", config.segments_path, "segments.csv (segment_id,start_s,end_s)")->required();
  qa->add_option("--threshold", config.threshold, "Minimum segment-mean difference that sets a trend");
  qa->add_option("--agreement", config.agreement, "Fraction of annotators needed for a consensus entry");
  qa->add_option("--attribute", config.attribute, "Attribute to rank when the traces hold several");
  qa->add_option("--scheme", config.scheme_path, "Optional scheme used to validate trace values");
  add_output(qa);

  auto* convert = app.add_subcommand("convert", "Map ordinal trace values to numbers through an explicit map");
  convert->add_option("inputs", config.inputs, "traces.csv scheme.json")->required()->expected(1, 2);
  convert->add_option("--scheme", config.scheme_path, "Scheme file (instead of the second positional)");
  convert->add_option("--attribute", config.attribute, "Attribute to convert")->required();
  convert->add_option("--map", config.map_spec, "level=value pairs, e.g. low=-1,medium=0,high=1");
  add_output(convert);

  auto* divergence = app.add_subcommand("divergence", "Loss between two ambiguity-aware representations");
  divergence->add_option("inputs", config.inputs, "true.json pred.json")->required()->expected(2);
  divergence->add_option("--method", config.method, "kl | tv")->check(CLI::IsMember({"kl", "tv"}));
  divergence->add_option("--scheme", config.scheme_path, "Scheme file when the representations embed none");
  add_output(divergence);

  auto* report = app.add_subcommand("report", "Summarize emitted artifacts");
  report->add_option("inputs", config.inputs, "artifact.json ...")->required()->expected(1, -1);
  add_output(report);

  CLI11_PARSE(app, argc, argv);
  config.command = app.get_subcommands().front()->get_name();

  try {
    const auto result = amber::run_pipeline(config);
    if (config.output_path.empty())
      std::cout << result.output;
    else
      amber::write_text_file(config.output_path, result.output);
    return result.exit_code;
  } catch (const amber::Error& e) {
    std::cerr << "amber: " << e.what() << '\n';
    return 2;
  }
}
