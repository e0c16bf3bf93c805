#include "gestlex/model.hpp"

#include <algorithm>
#include <cassert>

namespace gestlex {

std::string_view to_string(GestureKind k) {
  switch (k) {
    case GestureKind::Bite: return "bite";
    case GestureKind::Drink: return "drink";
    case GestureKind::Utensiling: return "utensiling";
    case GestureKind::Rest: return "rest";
    case GestureKind::Other: return "other";
  }
  return "?";
}

std::optional<GestureKind> parse_kind(std::string_view s) {
  if (s == "bite") return GestureKind::Bite;
  if (s == "drink") return GestureKind::Drink;
  if (s == "utensiling") return GestureKind::Utensiling;
  if (s == "rest") return GestureKind::Rest;
  if (s == "other") return GestureKind::Other;
  return std::nullopt;
}

std::string_view to_string(Hand h) {
  return h == Hand::Dominant ? "dominant" : "nondominant";
}

std::optional<Hand> parse_hand(std::string_view s) {
  if (s == "dominant") return Hand::Dominant;
  if (s == "nondominant") return Hand::NonDominant;
  return std::nullopt;
}

TimeMs intersection_ms(const Segment& a, const Segment& b) {
  const TimeMs lo = std::max(a.start, b.start);
  const TimeMs hi = std::min(a.end, b.end);
  return hi > lo ? hi - lo : 0;
}

bool overlaps(const Segment& a, const Segment& b) {
  return intersection_ms(a, b) > 0;
}

std::vector<Segment> derive_other_segments(const Timeline& t,
                                           const TimingConfig& cfg) {
  std::vector<Segment> out;
  TimeMs cursor = 0;
  for (const Segment& s : t.segments) {
    if (s.start - cursor >= cfg.gap_other_ms) {
      out.push_back({GestureKind::Other, cursor, s.start});
    }
    cursor = s.end;
  }
  // The meal span ends at the last explicit segment; there is no trailing gap.
  return out;
}

std::int64_t round_half_up_div(std::int64_t num, std::int64_t den) {
  assert(num >= 0 && den > 0);
  return (2 * num + den) / (2 * den);
}

TimeMs average_half_up(TimeMs a, TimeMs b) {
  return round_half_up_div(a + b, 2);
}

TimeMs samples15hz_to_ms(std::int64_t samples) {
  return round_half_up_div(samples * 1000, 15);
}

}  // namespace gestlex
