#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "gestlex/indexcmp.hpp"
#include "gestlex/ingest.hpp"
#include "gestlex/matcher.hpp"
#include "gestlex/sim.hpp"
#include "gestlex/stats.hpp"

namespace gestlex {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;

struct RunConfig {
  std::filesystem::path corpus_root;
  std::optional<std::filesystem::path> out_dir;
  OutputFormat format = OutputFormat::Text;
  TimeUnit unit = TimeUnit::Milliseconds;
  int jobs = 1;
  std::uint64_t seed = 0;
  TimingConfig timing;
  IndexCompareOptions index_options;
  int min_meals = 8;  ///< rater-table filter
};

std::vector<IndexEvent> dominant_only(const std::vector<IndexEvent>& events);

/// Full matching of one meal's raters: the first two (by rater id) form the
/// primary pair; any further rater is probed against their union, the way a
/// third labeling is evaluated.
struct MealMatchOutput {
  std::optional<MatchReport> primary;
  std::vector<MatchReport> probes;
  Timeline union_timeline;
  std::vector<MatchCase> union_cases;  ///< empty for single-rater pass-through
  bool single_rater = false;
};

MealMatchOutput match_meal(const std::vector<Timeline>& raters,
                           const std::vector<IndexEvent>& events,
                           const TimingConfig& cfg);

/// Union file: ingest columns plus `case` and `derived`; derived `other`
/// rows are included and flagged.
std::string serialize_union_file(const Timeline& union_timeline,
                                 const std::vector<MatchCase>& cases,
                                 const TimingConfig& cfg);

std::string serialize_match_groups(const std::vector<MatchReport>& reports,
                                   OutputFormat format);

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_stats(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_match(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_index_compare(const RunConfig& cfg, std::ostream& out,
                      std::ostream& err);
int cmd_simulate(const RunConfig& cfg,
                 const std::optional<std::filesystem::path>& config_path,
                 std::optional<int> n_meals_override, std::ostream& out,
                 std::ostream& err);

}  // namespace gestlex
