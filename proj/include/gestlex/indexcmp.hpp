#pragma once

#include <optional>
#include <vector>

#include "gestlex/model.hpp"

namespace gestlex {

enum class IndexOutcome : std::uint8_t { Agreement, Ambiguity, Missed };

std::string_view to_string(IndexOutcome o);

/// One intake gesture with its contained events, or an uncontained event.
struct IndexMatchOutcome {
  IndexOutcome outcome{};
  std::optional<Segment> gesture;  ///< absent for event-side misses
  std::vector<IndexEvent> events;
};

struct IndexCompareCounts {
  std::int64_t agreement = 0;
  std::int64_t ambiguity = 0;
  std::int64_t missed_gestures = 0;  ///< intake gestures containing no event
  std::int64_t missed_events = 0;    ///< events contained in no gesture

  std::int64_t missed() const { return missed_gestures + missed_events; }
  std::int64_t total() const { return agreement + ambiguity + missed(); }

  IndexCompareCounts& operator+=(const IndexCompareCounts& o);
};

struct IndexCompareOptions {
  /// When set, a bite event only satisfies a bite gesture (and likewise for
  /// drink); otherwise any intake event inside an intake gesture counts.
  bool kind_strict = true;
};

struct IndexCompareResult {
  std::vector<IndexMatchOutcome> outcomes;
  IndexCompareCounts counts;
};

/// Assign every intake gesture and every event to exactly one outcome.
/// Containment is boundary-inclusive (start <= t <= end). Events must
/// already be filtered to the dominant hand.
IndexCompareResult compare_to_index(const Timeline& timeline,
                                    const std::vector<IndexEvent>& events,
                                    const IndexCompareOptions& opts = {});

}  // namespace gestlex
