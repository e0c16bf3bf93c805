#pragma once

#include <array>
#include <string>
#include <vector>

#include "gestlex/indexcmp.hpp"
#include "gestlex/ingest.hpp"
#include "gestlex/matcher.hpp"

namespace gestlex {

enum class OutputFormat : std::uint8_t { Text, Csv, JsonLines };

std::optional<OutputFormat> parse_format(std::string_view s);
std::string_view to_string(OutputFormat f);

/// part/whole as a percentage; 0.0 when the denominator is empty.
double pct(std::int64_t part, std::int64_t whole);

/// Display rounding: half up to one decimal place.
double round1(double percent);

struct KindDurationStats {
  std::int64_t count = 0;
  double mean_ms = 0.0;
  double stddev_ms = 0.0;  ///< population standard deviation
  TimeMs min_ms = 0;
  TimeMs max_ms = 0;
};

/// Duration distribution per kind, pooled over every rater's labeling with
/// derived `other` segments included.
struct DurationStats {
  std::array<KindDurationStats, kNumKinds> per_kind{};

  const KindDurationStats& of(GestureKind k) const {
    return per_kind[static_cast<std::size_t>(k)];
  }
};

DurationStats duration_stats(const Corpus& corpus, const TimingConfig& cfg);

/// One column of the reliability breakdown (everything, or one kind).
/// Case and overall-agreement percentages are direct ratios of the column
/// total; the two aggregate rows (overall BA, overall mistake) are the sums
/// of their display-rounded constituent rows, which is how the reference
/// breakdown totals its parts.
struct ReliabilityColumn {
  std::int64_t cases[kNumCases] = {};

  std::int64_t count(MatchCase c) const {
    return cases[static_cast<int>(c)];
  }
  std::int64_t overall_mistake() const;
  std::int64_t overall_ba() const;
  std::int64_t overall_agreement() const;
  std::int64_t total() const;

  double case_pct(MatchCase c) const { return pct(count(c), total()); }
  double overall_mistake_pct() const;
  double overall_ba_pct() const;
  double overall_agreement_pct() const {
    return pct(overall_agreement(), total());
  }
};

struct ReliabilityTable {
  ReliabilityColumn all;
  std::array<ReliabilityColumn, 4> by_kind;  ///< GroupCounts kind order

  const ReliabilityColumn& of(GestureKind k) const {
    return by_kind[GroupCounts::kind_index(k)];
  }
};

ReliabilityTable make_reliability_table(const GroupCounts& counts);
ReliabilityTable reliability_table(const std::vector<MatchReport>& reports);

/// Intake-gesture vs index-label agreement, split by rater coverage.
struct IndexTable {
  IndexCompareCounts one_rater;
  IndexCompareCounts two_raters;
};

/// Per-rater reliability over doubly-labeled meals. A rater's own gestures
/// partition into exact agreement, boundary ambiguity and mistake by the
/// case of the group they belong to.
struct RaterRow {
  std::string rater_id;
  std::int64_t meals = 0;
  std::int64_t gestures = 0;
  std::int64_t exact = 0;
  std::int64_t ba = 0;
  std::int64_t mistake = 0;

  std::int64_t total_agreement() const { return exact + ba; }
};

struct RaterTable {
  std::vector<RaterRow> rows;  ///< raters with at least min_meals meals
  int min_meals = 8;
};

RaterTable rater_table(const std::vector<MatchReport>& reports,
                       int min_meals = 8);

std::string render_duration_stats(const DurationStats& stats, OutputFormat f);
std::string render_reliability(const ReliabilityTable& table, OutputFormat f);
std::string render_index_table(const IndexTable& table, OutputFormat f);
std::string render_rater_table(const RaterTable& table, OutputFormat f);

}  // namespace gestlex
