#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gestlex/model.hpp"

namespace gestlex {

/// The six ways a gesture can relate to the other rater's labeling.
enum class MatchCase : std::uint8_t {
  Agreement,             ///< 1:1 same kind, both boundaries within tolerance
  BoundaryAmbiguityI,    ///< 1:1 same kind, a boundary beyond tolerance, nothing else inside
  BoundaryAmbiguityII,   ///< N:1 or N:N same kind (split/merge)
  BoundaryAmbiguityIII,  ///< 1:1 beyond tolerance with another gesture inside the extent
  MistakeMissed,         ///< labeled by one rater, nothing overlapping from the other
  MistakeIdentity,       ///< overlaps only gestures of a different kind
};

constexpr std::size_t kNumCases = 6;

std::string_view to_string(MatchCase c);
std::string_view display_name(MatchCase c);  ///< "Agreement", "BA I", ...

enum class BoundarySide : std::uint8_t { Start, End };

/// Merge one boundary labeled by two raters: rounded-half-up average when the
/// two labels are within tolerance of each other, otherwise whichever label
/// extends the gesture furthest (the earlier start, the later end).
TimeMs merge_boundary(TimeMs t1, TimeMs t2, BoundarySide side,
                      const TimingConfig& cfg);

/// One matched group of segments and the union segment it resolves to.
struct MatchGroup {
  MatchCase match_case{};
  GestureKind kind{};
  std::vector<Segment> members_a;
  std::vector<Segment> members_b;
  std::optional<Segment> union_segment;
  /// For mistakes: the rater charged with the disagreement.
  std::optional<std::string> attributed_rater;
  /// Arbitration or conflict context, carried into the group report.
  std::string note;
};

/// Group counts per explicit kind and case; one count per group.
struct GroupCounts {
  std::int64_t table[4][kNumCases] = {};

  static int kind_index(GestureKind k);
  std::int64_t& at(GestureKind k, MatchCase c);
  std::int64_t at(GestureKind k, MatchCase c) const;
  std::int64_t case_total(MatchCase c) const;
  std::int64_t kind_total(GestureKind k) const;
  std::int64_t total() const;
};

struct MatchReport {
  std::string meal_id;
  std::string rater_a;
  std::string rater_b;
  std::vector<MatchGroup> groups;
  Timeline union_timeline;
  /// Case that resolved each union segment, parallel to the union's segments.
  std::vector<MatchCase> union_cases;
  GroupCounts counts;
};

struct MealMismatchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Overlap structure between two sorted segment lists: edges join segments of
/// equal kind with positive intersection; components are the connected
/// components of that bipartite relation. Built with a linear two-pointer
/// sweep over the sorted inputs.
struct OverlapComponents {
  std::vector<std::pair<int, int>> edges;  ///< (index into a, index into b)
  std::vector<std::vector<int>> comp_a;    ///< per component, indices into a
  std::vector<std::vector<int>> comp_b;
  std::vector<int> comp_of_a;  ///< component id per segment, -1 = unmatched
  std::vector<int> comp_of_b;
};

OverlapComponents overlap_components(const std::vector<Segment>& a,
                                     const std::vector<Segment>& b);

/// Match two raters' timelines of the same meal into case-classified groups
/// and the union timeline. Deterministic and symmetric: swapping a and b
/// yields the same case multiset, per-kind counts and union.
///
/// index_events must already be filtered to the dominant hand; they arbitrate
/// split/merge groups of intake kinds and corroborate identity conflicts.
MatchReport match_pair(const Timeline& a, const Timeline& b,
                       const std::vector<IndexEvent>& index_events,
                       const TimingConfig& cfg);

}  // namespace gestlex
