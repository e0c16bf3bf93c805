#include "gestlex/matcher.hpp"

#include <algorithm>
#include <cassert>
#include <cstdlib>
#include <map>
#include <numeric>
#include <tuple>

namespace gestlex {

std::string_view to_string(MatchCase c) {
  switch (c) {
    case MatchCase::Agreement: return "agreement";
    case MatchCase::BoundaryAmbiguityI: return "ba_i";
    case MatchCase::BoundaryAmbiguityII: return "ba_ii";
    case MatchCase::BoundaryAmbiguityIII: return "ba_iii";
    case MatchCase::MistakeMissed: return "mistake_missed";
    case MatchCase::MistakeIdentity: return "mistake_identity";
  }
  return "?";
}

std::string_view display_name(MatchCase c) {
  switch (c) {
    case MatchCase::Agreement: return "Agreement";
    case MatchCase::BoundaryAmbiguityI: return "BA I";
    case MatchCase::BoundaryAmbiguityII: return "BA II";
    case MatchCase::BoundaryAmbiguityIII: return "BA III";
    case MatchCase::MistakeMissed: return "Mistake-missed";
    case MatchCase::MistakeIdentity: return "Mistake-identity";
  }
  return "?";
}

TimeMs merge_boundary(TimeMs t1, TimeMs t2, BoundarySide side,
                      const TimingConfig& cfg) {
  const TimeMs delta = t1 > t2 ? t1 - t2 : t2 - t1;
  if (delta <= cfg.tolerance_ms) return average_half_up(t1, t2);
  return side == BoundarySide::Start ? std::min(t1, t2) : std::max(t1, t2);
}

int GroupCounts::kind_index(GestureKind k) {
  switch (k) {
    case GestureKind::Bite: return 0;
    case GestureKind::Drink: return 1;
    case GestureKind::Utensiling: return 2;
    case GestureKind::Rest: return 3;
    case GestureKind::Other: break;
  }
  assert(false && "other never appears in match groups");
  return 0;
}

std::int64_t& GroupCounts::at(GestureKind k, MatchCase c) {
  return table[kind_index(k)][static_cast<int>(c)];
}

std::int64_t GroupCounts::at(GestureKind k, MatchCase c) const {
  return table[kind_index(k)][static_cast<int>(c)];
}

std::int64_t GroupCounts::case_total(MatchCase c) const {
  std::int64_t sum = 0;
  for (int k = 0; k < 4; ++k) sum += table[k][static_cast<int>(c)];
  return sum;
}

std::int64_t GroupCounts::kind_total(GestureKind k) const {
  std::int64_t sum = 0;
  for (std::size_t c = 0; c < kNumCases; ++c) sum += table[kind_index(k)][c];
  return sum;
}

std::int64_t GroupCounts::total() const {
  std::int64_t sum = 0;
  for (std::size_t c = 0; c < kNumCases; ++c) {
    sum += case_total(static_cast<MatchCase>(c));
  }
  return sum;
}

namespace {

struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int x, int y) { parent[find(x)] = find(y); }
};

}  // namespace

OverlapComponents overlap_components(const std::vector<Segment>& a,
                                     const std::vector<Segment>& b) {
  OverlapComponents oc;
  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(b.size());
  oc.comp_of_a.assign(n, -1);
  oc.comp_of_b.assign(m, -1);

  // Both lists are sorted and internally non-overlapping, so all cross
  // overlaps fall out of one linear pass.
  int i = 0, j = 0;
  while (i < n && j < m) {
    if (a[i].end <= b[j].start) {
      ++i;
    } else if (b[j].end <= a[i].start) {
      ++j;
    } else {
      if (a[i].kind == b[j].kind) oc.edges.emplace_back(i, j);
      if (a[i].end <= b[j].end) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  Dsu dsu(n + m);
  for (const auto& [x, y] : oc.edges) dsu.unite(x, n + y);

  // Only classes joined by at least one edge form components; order them by
  // earliest member start so the result is independent of input roles.
  std::map<int, std::pair<std::vector<int>, std::vector<int>>> classes;
  for (const auto& [x, y] : oc.edges) {
    auto& cls = classes[dsu.find(x)];
    cls.first.push_back(x);
    cls.second.push_back(y);
  }
  std::vector<std::pair<TimeMs, int>> order;
  for (auto& [root, cls] : classes) {
    std::sort(cls.first.begin(), cls.first.end());
    cls.first.erase(std::unique(cls.first.begin(), cls.first.end()),
                    cls.first.end());
    std::sort(cls.second.begin(), cls.second.end());
    cls.second.erase(std::unique(cls.second.begin(), cls.second.end()),
                     cls.second.end());
    const TimeMs first_start =
        std::min(a[cls.first.front()].start, b[cls.second.front()].start);
    order.emplace_back(first_start, root);
  }
  std::sort(order.begin(), order.end());

  for (const auto& [start, root] : order) {
    (void)start;
    const int id = static_cast<int>(oc.comp_a.size());
    auto& cls = classes[root];
    for (int x : cls.first) oc.comp_of_a[x] = id;
    for (int y : cls.second) oc.comp_of_b[y] = id;
    oc.comp_a.push_back(std::move(cls.first));
    oc.comp_b.push_back(std::move(cls.second));
  }
  return oc;
}

namespace {

bool contains_event(const std::vector<IndexEvent>& events, GestureKind kind,
                    TimeMs start, TimeMs end) {
  for (const IndexEvent& e : events) {
    if (e.kind == kind && e.t >= start && e.t <= end) return true;
  }
  return false;
}

int count_events(const std::vector<IndexEvent>& events, GestureKind kind,
                 TimeMs start, TimeMs end) {
  int count = 0;
  for (const IndexEvent& e : events) {
    if (e.kind == kind && e.t >= start && e.t <= end) ++count;
  }
  return count;
}

// [min start, max end] of a component's members on one side. Indices are
// sorted and the list is non-overlapping, so the span is just first/last.
Segment side_span(const std::vector<Segment>& segs, const std::vector<int>& idx,
                  GestureKind kind) {
  return Segment{kind, segs[idx.front()].start, segs[idx.back()].end};
}

// Any segment other than exclude_idx with a positive intersection with
// [lo, hi]. Ends are monotone in a sorted non-overlapping list, so the scan
// starts at the first candidate.
bool any_third_inside(const std::vector<Segment>& segs, TimeMs lo, TimeMs hi,
                      int exclude_idx) {
  auto it = std::partition_point(
      segs.begin(), segs.end(), [&](const Segment& s) { return s.end <= lo; });
  for (; it != segs.end() && it->start < hi; ++it) {
    if (static_cast<int>(it - segs.begin()) == exclude_idx) continue;
    return true;
  }
  return false;
}

std::vector<int> overlapping_indices(const std::vector<Segment>& segs,
                                     const Segment& u) {
  std::vector<int> out;
  auto it = std::partition_point(
      segs.begin(), segs.end(),
      [&](const Segment& s) { return s.end <= u.start; });
  for (; it != segs.end() && it->start < u.end; ++it) {
    out.push_back(static_cast<int>(it - segs.begin()));
  }
  return out;
}

// Identity-conflict resolution between two unmatched segments of different
// kinds: a contained dominant index event of the segment's own kind wins,
// then the longer duration, then the lexicographically smaller rater.
bool beats(const Segment& u, const std::string& u_rater, const Segment& v,
           const std::string& v_rater,
           const std::vector<IndexEvent>& events) {
  const bool cu = is_intake(u.kind) && contains_event(events, u.kind, u.start, u.end);
  const bool cv = is_intake(v.kind) && contains_event(events, v.kind, v.start, v.end);
  if (cu != cv) return cu;
  if (u.duration() != v.duration()) return u.duration() > v.duration();
  return u_rater < v_rater;
}

struct UnionEntry {
  Segment seg;
  MatchCase source{};
};

std::string span_text(const Segment& s) {
  return std::string(to_string(s.kind)) + "[" + std::to_string(s.start) + "-" +
         std::to_string(s.end) + "]";
}

}  // namespace

MatchReport match_pair(const Timeline& a, const Timeline& b,
                       const std::vector<IndexEvent>& index_events,
                       const TimingConfig& cfg) {
  if (a.meal_id != b.meal_id) {
    throw MealMismatchError("match_pair: timelines are from different meals ('" +
                            a.meal_id + "' vs '" + b.meal_id + "')");
  }

  MatchReport report;
  report.meal_id = a.meal_id;
  report.rater_a = a.rater_id;
  report.rater_b = b.rater_id;

  const std::vector<Segment>& sa = a.segments;
  const std::vector<Segment>& sb = b.segments;
  const OverlapComponents oc = overlap_components(sa, sb);

  std::vector<MatchGroup> groups;
  std::vector<UnionEntry> union_entries;
  auto resolve_to_union = [&](const Segment& seg, MatchCase source) {
    union_entries.push_back({seg, source});
  };

  // Same-identity components.
  for (std::size_t c = 0; c < oc.comp_a.size(); ++c) {
    const std::vector<int>& ia = oc.comp_a[c];
    const std::vector<int>& ib = oc.comp_b[c];
    MatchGroup g;
    g.kind = sa[ia.front()].kind;
    for (int i : ia) g.members_a.push_back(sa[i]);
    for (int j : ib) g.members_b.push_back(sb[j]);

    if (ia.size() == 1 && ib.size() == 1) {
      const Segment& x = sa[ia[0]];
      const Segment& y = sb[ib[0]];
      const TimeMs start_delta = std::abs(x.start - y.start);
      const TimeMs end_delta = std::abs(x.end - y.end);
      const Segment merged{g.kind,
                           merge_boundary(x.start, y.start, BoundarySide::Start, cfg),
                           merge_boundary(x.end, y.end, BoundarySide::End, cfg)};
      if (start_delta <= cfg.tolerance_ms && end_delta <= cfg.tolerance_ms) {
        g.match_case = MatchCase::Agreement;
      } else {
        // Maximum extent of the pair; any third gesture poking into it turns
        // the ambiguity from a plain boundary shift into a straddle.
        const TimeMs lo = std::min(x.start, y.start);
        const TimeMs hi = std::max(x.end, y.end);
        const bool third = any_third_inside(sa, lo, hi, ia[0]) ||
                           any_third_inside(sb, lo, hi, ib[0]);
        g.match_case = third ? MatchCase::BoundaryAmbiguityIII
                             : MatchCase::BoundaryAmbiguityI;
      }
      g.union_segment = merged;
    } else {
      g.match_case = MatchCase::BoundaryAmbiguityII;
      const Segment span_a = side_span(sa, ia, g.kind);
      const Segment span_b = side_span(sb, ib, g.kind);
      const Segment max_extent{g.kind, std::min(span_a.start, span_b.start),
                               std::max(span_a.end, span_b.end)};
      if (is_intake(g.kind)) {
        const int ea = count_events(index_events, g.kind, span_a.start, span_a.end);
        const int eb = count_events(index_events, g.kind, span_b.start, span_b.end);
        const bool a_matches = ea == static_cast<int>(ia.size());
        const bool b_matches = eb == static_cast<int>(ib.size());
        if (a_matches || b_matches) {
          if (span_a.duration() > span_b.duration()) {
            g.union_segment = span_a;
          } else if (span_b.duration() > span_a.duration()) {
            g.union_segment = span_b;
          } else {
            g.union_segment = max_extent;
          }
          g.note = a_matches && b_matches
                       ? "index count matches both raters"
                       : "index count matches rater " +
                             (a_matches ? a.rater_id : b.rater_id);
        } else {
          g.union_segment = max_extent;
          g.note = "index count matches neither rater; max extent taken";
        }
      } else {
        g.union_segment = max_extent;
      }
    }
    resolve_to_union(*g.union_segment, g.match_case);
    groups.push_back(std::move(g));
  }

  // Unmatched segments: missed entirely, or identity conflicts.
  auto classify_unmatched = [&](const Segment& u, const std::string& own_rater,
                                const std::string& other_rater,
                                const std::vector<Segment>& other_segs,
                                const std::vector<int>& other_comp_of,
                                bool u_is_side_a) {
    MatchGroup g;
    g.kind = u.kind;
    (u_is_side_a ? g.members_a : g.members_b).push_back(u);

    const std::vector<int> counterparts = overlapping_indices(other_segs, u);
    if (counterparts.empty()) {
      g.match_case = MatchCase::MistakeMissed;
      g.attributed_rater = other_rater;
      g.union_segment = u;
      resolve_to_union(u, g.match_case);
      groups.push_back(std::move(g));
      return;
    }

    g.match_case = MatchCase::MistakeIdentity;
    bool wins = true;
    int best = counterparts.front();
    TimeMs best_overlap = 0;
    for (int v : counterparts) {
      const Segment& vs = other_segs[v];
      if (other_comp_of[v] >= 0) {
        wins = false;  // a matched gesture already resolves this region
      } else if (!beats(u, own_rater, vs, other_rater, index_events)) {
        wins = false;
      }
      const TimeMs ov = intersection_ms(u, vs);
      if (ov > best_overlap) {
        best_overlap = ov;
        best = v;
      }
    }
    g.note = "conflicts with " + span_text(other_segs[best]) + " by rater " +
             other_rater;
    if (wins) {
      g.attributed_rater = other_rater;
      g.union_segment = u;
      resolve_to_union(u, g.match_case);
    } else {
      g.attributed_rater = own_rater;
    }
    groups.push_back(std::move(g));
  };

  for (std::size_t i = 0; i < sa.size(); ++i) {
    if (oc.comp_of_a[i] < 0) {
      classify_unmatched(sa[i], a.rater_id, b.rater_id, sb, oc.comp_of_b, true);
    }
  }
  for (std::size_t j = 0; j < sb.size(); ++j) {
    if (oc.comp_of_b[j] < 0) {
      classify_unmatched(sb[j], b.rater_id, a.rater_id, sa, oc.comp_of_a, false);
    }
  }

  // Union assembly: sort, trim residual overlaps (later start yields), drop
  // segments trimmed below the minimum unless a contained index event
  // corroborates the intake gesture, in which case the non-intake neighbor
  // yields instead.
  std::sort(union_entries.begin(), union_entries.end(),
            [](const UnionEntry& l, const UnionEntry& r) {
              return std::tuple(l.seg.start, l.seg.end,
                                static_cast<int>(l.seg.kind)) <
                     std::tuple(r.seg.start, r.seg.end,
                                static_cast<int>(r.seg.kind));
            });
  std::vector<UnionEntry> kept;
  for (UnionEntry entry : union_entries) {
    if (!kept.empty() && entry.seg.start < kept.back().seg.end) {
      const TimeMs original_start = entry.seg.start;
      entry.seg.start = kept.back().seg.end;
      if (entry.seg.end - entry.seg.start >= cfg.min_gesture_ms) {
        kept.push_back(entry);
        continue;
      }
      const bool corroborated =
          is_intake(entry.seg.kind) &&
          contains_event(index_events, entry.seg.kind, original_start,
                         entry.seg.end);
      if (corroborated && !is_intake(kept.back().seg.kind)) {
        entry.seg.start = original_start;
        kept.back().seg.end = original_start;
        if (kept.back().seg.duration() < cfg.min_gesture_ms) kept.pop_back();
        kept.push_back(entry);
      }
      // otherwise the trimmed segment is dropped
    } else {
      kept.push_back(entry);
    }
  }

  report.union_timeline.meal_id = a.meal_id;
  report.union_timeline.rater_id = "union";
  for (const UnionEntry& e : kept) {
    report.union_timeline.segments.push_back(e.seg);
    report.union_cases.push_back(e.source);
  }

  // Deterministic group order: earliest member, then kind, then case.
  std::sort(groups.begin(), groups.end(), [](const MatchGroup& l,
                                             const MatchGroup& r) {
    auto key = [](const MatchGroup& g) {
      TimeMs start = std::numeric_limits<TimeMs>::max();
      TimeMs end = std::numeric_limits<TimeMs>::max();
      for (const Segment& s : g.members_a) {
        start = std::min(start, s.start);
        end = std::min(end, s.end);
      }
      for (const Segment& s : g.members_b) {
        start = std::min(start, s.start);
        end = std::min(end, s.end);
      }
      return std::tuple(start, end, static_cast<int>(g.kind),
                        static_cast<int>(g.match_case),
                        g.members_a.size() + g.members_b.size());
    };
    return key(l) < key(r);
  });

  for (const MatchGroup& g : groups) {
    ++report.counts.at(g.kind, g.match_case);
  }
  report.groups = std::move(groups);
  return report;
}

}  // namespace gestlex
