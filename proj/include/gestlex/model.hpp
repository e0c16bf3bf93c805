#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gestlex {

/// Milliseconds from meal start. Subtracting two time points gives a signed
/// duration in milliseconds.
using TimeMs = std::int64_t;

/// The five-gesture lexicon. `Other` is never written by raters; it is
/// derived from unlabeled gaps (see derive_other_segments).
enum class GestureKind : std::uint8_t { Bite, Drink, Utensiling, Rest, Other };

constexpr std::size_t kNumKinds = 5;

/// The four kinds raters label explicitly, in file order.
constexpr std::array<GestureKind, 4> kExplicitKinds = {
    GestureKind::Bite, GestureKind::Drink, GestureKind::Utensiling,
    GestureKind::Rest};

constexpr bool is_intake(GestureKind k) {
  return k == GestureKind::Bite || k == GestureKind::Drink;
}

constexpr bool is_non_intake(GestureKind k) {
  return k == GestureKind::Utensiling || k == GestureKind::Rest;
}

std::string_view to_string(GestureKind k);
std::optional<GestureKind> parse_kind(std::string_view s);

enum class Hand : std::uint8_t { Dominant, NonDominant };

std::string_view to_string(Hand h);
std::optional<Hand> parse_hand(std::string_view s);

/// Timing constants of the labeling scheme, all in milliseconds.
struct TimingConfig {
  TimeMs tolerance_ms = 1000;    ///< boundary disagreement merged by averaging up to here
  TimeMs gap_other_ms = 4000;    ///< unlabeled gaps at least this long become `other`
  TimeMs min_gesture_ms = 1000;  ///< minimum duration of bite/drink/utensiling/rest
  TimeMs min_other_ms = 4000;    ///< minimum duration of a derived `other`

  bool valid() const {
    return tolerance_ms > 0 && gap_other_ms > 0 && min_gesture_ms > 0 &&
           min_other_ms >= min_gesture_ms;
  }

  TimeMs min_duration_ms(GestureKind k) const {
    return k == GestureKind::Other ? min_other_ms : min_gesture_ms;
  }
};

/// One labeled interval. start < end always.
struct Segment {
  GestureKind kind{};
  TimeMs start = 0;
  TimeMs end = 0;

  TimeMs duration() const { return end - start; }
  bool operator==(const Segment&) const = default;
};

/// Positive-length temporal intersection in ms; 0 when the segments only touch.
TimeMs intersection_ms(const Segment& a, const Segment& b);

/// Overlap means strictly positive intersection.
bool overlaps(const Segment& a, const Segment& b);

/// One rater's labeling of one meal. Segments are sorted by start and never
/// overlap one another: a rater annotates a single hand, one gesture at a
/// time.
struct Timeline {
  std::string meal_id;
  std::string rater_id;
  std::vector<Segment> segments;

  bool operator==(const Timeline&) const = default;
};

/// Single-timestamp bite/drink label with hand attribution.
struct IndexEvent {
  std::string meal_id;
  TimeMs t = 0;
  GestureKind kind{};  ///< Bite or Drink only
  Hand hand{};

  bool operator==(const IndexEvent&) const = default;
};

/// Unlabeled gaps of at least cfg.gap_other_ms within [0, last explicit end],
/// returned as `other` segments. Shorter gaps are transitions and yield
/// nothing. An empty timeline has no span and yields nothing.
std::vector<Segment> derive_other_segments(const Timeline& t,
                                           const TimingConfig& cfg);

/// num/den rounded half up; num must be non-negative, den positive.
std::int64_t round_half_up_div(std::int64_t num, std::int64_t den);

/// Average of two non-negative time points, rounded half up.
TimeMs average_half_up(TimeMs a, TimeMs b);

/// Sample index at the 15 Hz native rate to milliseconds, rounded half up.
TimeMs samples15hz_to_ms(std::int64_t samples);

}  // namespace gestlex
