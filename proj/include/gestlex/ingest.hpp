#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gestlex/model.hpp"

namespace gestlex {

/// Validation rules. The five semantic classes plus Syntax for rows that
/// cannot be read at all (malformed fields, bad header, unrecognized files).
enum class Rule : std::uint8_t {
  Syntax,
  NegativeTime,
  BadKind,
  MinDuration,
  Unordered,
  Overlap,
};

std::string_view to_string(Rule r);

struct ValidationIssue {
  std::string meal_id;
  std::string rater_id;  ///< empty for index files and corpus-level issues
  int ordinal = -1;      ///< segment/event ordinal within the file, -1 if n/a
  Rule rule{};
  std::string message;  ///< carries the source line number where applicable
};

std::string format_issue(const ValidationIssue& issue);

/// All timelines and index events of a label corpus, keyed by meal.
struct Corpus {
  std::map<std::string, std::vector<Timeline>> meals;
  std::map<std::string, std::vector<IndexEvent>> index_events;
};

enum class TimeUnit : std::uint8_t { Milliseconds, Samples15Hz };

/// Parser result: timeline is engaged exactly when issues is empty.
struct SegmentParseResult {
  std::optional<Timeline> timeline;
  std::vector<ValidationIssue> issues;
};

struct IndexParseResult {
  std::optional<std::vector<IndexEvent>> events;
  std::vector<ValidationIssue> issues;
};

/// Parse one rater's segment file (CSV: kind,start_ms,end_ms with a header,
/// `#` comments allowed). All violations are reported, not just the first.
/// `other` rows are rejected unless marked derived=1, in which case they are
/// skipped (they are re-derivable from the gaps).
SegmentParseResult parse_segment_file(std::string_view text,
                                      const TimingConfig& cfg,
                                      std::string meal_id = "",
                                      std::string rater_id = "",
                                      TimeUnit unit = TimeUnit::Milliseconds);

/// Parse an index-label file (CSV: kind,t_ms,hand). Only intake kinds are
/// legal; nondominant events are accepted and carry their hand attribution
/// so callers can exclude them.
IndexParseResult parse_index_file(std::string_view text,
                                  std::string meal_id = "",
                                  TimeUnit unit = TimeUnit::Milliseconds);

/// Semantic checks on an already-decoded segment list (ordering, overlap,
/// durations, times). Shared by the parser and by re-validation of
/// generated or merged timelines.
std::vector<ValidationIssue> validate_segments(
    const std::vector<Segment>& segments, const TimingConfig& cfg,
    const std::string& meal_id = "", const std::string& rater_id = "");

std::string serialize_timeline(const Timeline& t);
std::string serialize_index_events(const std::vector<IndexEvent>& events);

struct LoadResult {
  Corpus corpus;
  std::vector<ValidationIssue> issues;
};

/// Walk `root/<meal_id>/rater_<id>.csv` + `root/<meal_id>/index.csv` in
/// sorted path order. Every file is either parsed or reported; nothing is
/// silently dropped (the simulator's provenance.csv is recognized metadata).
LoadResult load_corpus(const std::filesystem::path& root,
                       const TimingConfig& cfg,
                       TimeUnit unit = TimeUnit::Milliseconds);

/// Write a corpus in the layout load_corpus expects. Overwrites files.
void write_corpus(const std::filesystem::path& root, const Corpus& corpus);

}  // namespace gestlex
