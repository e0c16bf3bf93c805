#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gestlex/cli.hpp"

int main(int argc, char** argv) {
  using namespace gestlex;

  CLI::App app{
      "Segment-based eating-gesture labeling toolkit: corpus validation, "
      "six-case inter-rater matching with union timelines, reliability "
      "tables, index-label comparison, and a seeded rater-noise simulator"};
  app.require_subcommand(1);

  std::string corpus_str;
  std::string out_str;
  std::string format_str = "text";
  std::string unit_str = "ms";
  std::int64_t tolerance_ms = 1000;
  std::int64_t gap_other_ms = 4000;
  std::int64_t min_gesture_ms = 1000;
  std::int64_t min_other_ms = 4000;
  std::uint64_t seed = 0;
  bool index_any_kind = false;
  RunConfig cfg;

  app.add_option("--corpus", corpus_str, "Corpus root directory");
  app.add_option("--out", out_str, "Directory for result files");
  app.add_option("--format", format_str, "Report format")
      ->check(CLI::IsMember({"text", "csv", "json-lines"}));
  app.add_option("--unit", unit_str,
                 "Time unit of input files (samples15hz converts at ingest)")
      ->check(CLI::IsMember({"ms", "samples15hz"}));
  app.add_option("--jobs", cfg.jobs, "Meal-level parallelism")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Simulator seed");
  app.add_option("--tolerance-ms", tolerance_ms,
                 "Boundary disagreement merged by averaging up to here")
      ->check(CLI::PositiveNumber);
  app.add_option("--gap-other-ms", gap_other_ms,
                 "Unlabeled gaps at least this long count as 'other'")
      ->check(CLI::PositiveNumber);
  app.add_option("--min-gesture-ms", min_gesture_ms,
                 "Minimum duration of an explicit gesture")
      ->check(CLI::PositiveNumber);
  app.add_option("--min-other-ms", min_other_ms,
                 "Minimum duration of a derived 'other'")
      ->check(CLI::PositiveNumber);
  app.add_option("--min-meals", cfg.min_meals,
                 "Per-rater table: minimum meals labeled")
      ->check(CLI::PositiveNumber);
  app.add_flag("--index-any-kind", index_any_kind,
               "Let any intake event satisfy any intake gesture");

  auto* validate =
      app.add_subcommand("validate", "Check a corpus against the schema");
  auto* stats =
      app.add_subcommand("stats", "Duration statistics per gesture kind");
  auto* match = app.add_subcommand(
      "match", "Match raters pairwise, build unions, report reliability");
  auto* index_compare = app.add_subcommand(
      "index-compare", "Compare intake gestures against index labels");
  auto* simulate = app.add_subcommand(
      "simulate", "Generate a synthetic corpus with tagged rater noise");

  std::string sim_config_str;
  int sim_meals = 0;
  bool dump_config = false;
  simulate->add_option("--config", sim_config_str,
                       "Model/noise config file (key = value)");
  simulate->add_option("--meals", sim_meals,
                       "Number of meals (overrides the config file)");
  simulate->add_flag("--dump-config", dump_config,
                     "Print the default config template and exit");

  for (CLI::App* sub : {validate, stats, match, index_compare, simulate}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  cfg.timing = {tolerance_ms, gap_other_ms, min_gesture_ms, min_other_ms};
  if (!cfg.timing.valid()) {
    std::cerr << "invalid timing configuration (all values positive, "
                 "min-other >= min-gesture)\n";
    return kExitUsage;
  }
  cfg.format = *parse_format(format_str);
  cfg.unit = unit_str == "samples15hz" ? TimeUnit::Samples15Hz
                                       : TimeUnit::Milliseconds;
  cfg.seed = seed;
  cfg.index_options.kind_strict = !index_any_kind;
  cfg.corpus_root = corpus_str;
  if (!out_str.empty()) cfg.out_dir = out_str;

  const bool needs_corpus = validate->parsed() || stats->parsed() ||
                            match->parsed() || index_compare->parsed();
  if (needs_corpus && corpus_str.empty()) {
    std::cerr << "--corpus is required\n";
    return kExitUsage;
  }

  try {
    if (simulate->parsed()) {
      if (dump_config) {
        std::cout << default_sim_config_text();
        return kExitOk;
      }
      return cmd_simulate(cfg,
                          sim_config_str.empty()
                              ? std::nullopt
                              : std::optional<std::filesystem::path>(
                                    sim_config_str),
                          sim_meals > 0 ? std::optional<int>(sim_meals)
                                        : std::nullopt,
                          std::cout, std::cerr);
    }
    if (validate->parsed()) return cmd_validate(cfg, std::cout, std::cerr);
    if (stats->parsed()) return cmd_stats(cfg, std::cout, std::cerr);
    if (match->parsed()) return cmd_match(cfg, std::cout, std::cerr);
    if (index_compare->parsed()) {
      return cmd_index_compare(cfg, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}
