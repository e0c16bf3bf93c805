#include "gestlex/indexcmp.hpp"

#include <algorithm>

namespace gestlex {

std::string_view to_string(IndexOutcome o) {
  switch (o) {
    case IndexOutcome::Agreement: return "agreement";
    case IndexOutcome::Ambiguity: return "ambiguity";
    case IndexOutcome::Missed: return "missed";
  }
  return "?";
}

IndexCompareCounts& IndexCompareCounts::operator+=(const IndexCompareCounts& o) {
  agreement += o.agreement;
  ambiguity += o.ambiguity;
  missed_gestures += o.missed_gestures;
  missed_events += o.missed_events;
  return *this;
}

IndexCompareResult compare_to_index(const Timeline& timeline,
                                    const std::vector<IndexEvent>& events,
                                    const IndexCompareOptions& opts) {
  IndexCompareResult result;

  std::vector<Segment> intake;
  for (const Segment& s : timeline.segments) {
    if (is_intake(s.kind)) intake.push_back(s);
  }

  // Each event goes to the first intake gesture containing it. Gestures of a
  // valid timeline overlap at most at shared boundaries, so "first" only
  // matters for an event sitting exactly on a touching boundary.
  std::vector<std::vector<IndexEvent>> contained(intake.size());
  std::vector<IndexEvent> uncontained;
  for (const IndexEvent& e : events) {
    bool assigned = false;
    for (std::size_t i = 0; i < intake.size(); ++i) {
      if (e.t < intake[i].start || e.t > intake[i].end) continue;
      if (opts.kind_strict && e.kind != intake[i].kind) continue;
      contained[i].push_back(e);
      assigned = true;
      break;
    }
    if (!assigned) uncontained.push_back(e);
  }

  for (std::size_t i = 0; i < intake.size(); ++i) {
    IndexMatchOutcome outcome;
    outcome.gesture = intake[i];
    outcome.events = contained[i];
    if (contained[i].size() == 1) {
      outcome.outcome = IndexOutcome::Agreement;
      ++result.counts.agreement;
    } else if (contained[i].size() >= 2) {
      outcome.outcome = IndexOutcome::Ambiguity;
      ++result.counts.ambiguity;
    } else {
      outcome.outcome = IndexOutcome::Missed;
      ++result.counts.missed_gestures;
    }
    result.outcomes.push_back(std::move(outcome));
  }
  for (const IndexEvent& e : uncontained) {
    IndexMatchOutcome outcome;
    outcome.outcome = IndexOutcome::Missed;
    outcome.events.push_back(e);
    ++result.counts.missed_events;
    result.outcomes.push_back(std::move(outcome));
  }
  return result;
}

}  // namespace gestlex
