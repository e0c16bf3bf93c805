#include "gestlex/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

namespace gestlex {

namespace {

using nlohmann::json;

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

std::string fmt1(double v) { return fmt("%.1f", v); }

// aligned plain-text table; first column left, the rest right
std::string render_text_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows) {
    if (widths.size() < row.size()) widths.resize(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) {
      widths[i] = std::max(widths[i], row[i].size());
    }
  }
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += "  ";
      const std::size_t pad = widths[i] - row[i].size();
      if (i == 0) {
        out += row[i] + std::string(pad, ' ');
      } else {
        out += std::string(pad, ' ') + row[i];
      }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += "\n";
  }
  return out;
}

std::string csv_join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += ",";
    out += fields[i];
  }
  out += "\n";
  return out;
}

constexpr std::array<MatchCase, kNumCases> kCaseOrder = {
    MatchCase::Agreement,           MatchCase::BoundaryAmbiguityI,
    MatchCase::BoundaryAmbiguityII, MatchCase::BoundaryAmbiguityIII,
    MatchCase::MistakeMissed,       MatchCase::MistakeIdentity,
};

// reference column order: everything, bite, drink, rest, utensiling
constexpr std::array<GestureKind, 4> kReliabilityKindOrder = {
    GestureKind::Bite, GestureKind::Drink, GestureKind::Rest,
    GestureKind::Utensiling};

constexpr std::array<GestureKind, 5> kDurationKindOrder = {
    GestureKind::Bite, GestureKind::Drink, GestureKind::Utensiling,
    GestureKind::Rest, GestureKind::Other};

}  // namespace

std::optional<OutputFormat> parse_format(std::string_view s) {
  if (s == "text") return OutputFormat::Text;
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json-lines") return OutputFormat::JsonLines;
  return std::nullopt;
}

std::string_view to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::Text: return "text";
    case OutputFormat::Csv: return "csv";
    case OutputFormat::JsonLines: return "json-lines";
  }
  return "?";
}

double pct(std::int64_t part, std::int64_t whole) {
  return whole > 0 ? 100.0 * static_cast<double>(part) /
                         static_cast<double>(whole)
                   : 0.0;
}

double round1(double percent) {
  return std::floor(percent * 10.0 + 0.5) / 10.0;
}

DurationStats duration_stats(const Corpus& corpus, const TimingConfig& cfg) {
  struct Acc {
    std::int64_t count = 0;
    double sum = 0.0;
    double sum_sq = 0.0;
    TimeMs min = std::numeric_limits<TimeMs>::max();
    TimeMs max = std::numeric_limits<TimeMs>::min();
  };
  std::array<Acc, kNumKinds> acc{};

  auto add = [&](const Segment& s) {
    Acc& a = acc[static_cast<std::size_t>(s.kind)];
    const double d = static_cast<double>(s.duration());
    ++a.count;
    a.sum += d;
    a.sum_sq += d * d;
    a.min = std::min(a.min, s.duration());
    a.max = std::max(a.max, s.duration());
  };

  for (const auto& [meal_id, timelines] : corpus.meals) {
    for (const Timeline& t : timelines) {
      for (const Segment& s : t.segments) add(s);
      for (const Segment& s : derive_other_segments(t, cfg)) add(s);
    }
  }

  DurationStats stats;
  for (std::size_t k = 0; k < kNumKinds; ++k) {
    const Acc& a = acc[k];
    KindDurationStats& out = stats.per_kind[k];
    out.count = a.count;
    if (a.count == 0) continue;
    out.mean_ms = a.sum / static_cast<double>(a.count);
    const double var =
        std::max(0.0, a.sum_sq / static_cast<double>(a.count) -
                          out.mean_ms * out.mean_ms);
    out.stddev_ms = std::sqrt(var);
    out.min_ms = a.min;
    out.max_ms = a.max;
  }
  return stats;
}

std::int64_t ReliabilityColumn::overall_mistake() const {
  return count(MatchCase::MistakeMissed) + count(MatchCase::MistakeIdentity);
}

std::int64_t ReliabilityColumn::overall_ba() const {
  return count(MatchCase::BoundaryAmbiguityI) +
         count(MatchCase::BoundaryAmbiguityII) +
         count(MatchCase::BoundaryAmbiguityIII);
}

std::int64_t ReliabilityColumn::overall_agreement() const {
  return count(MatchCase::Agreement) + overall_ba();
}

std::int64_t ReliabilityColumn::total() const {
  std::int64_t sum = 0;
  for (std::size_t c = 0; c < kNumCases; ++c) sum += cases[c];
  return sum;
}

double ReliabilityColumn::overall_mistake_pct() const {
  return round1(case_pct(MatchCase::MistakeMissed)) +
         round1(case_pct(MatchCase::MistakeIdentity));
}

double ReliabilityColumn::overall_ba_pct() const {
  return round1(case_pct(MatchCase::BoundaryAmbiguityI)) +
         round1(case_pct(MatchCase::BoundaryAmbiguityII)) +
         round1(case_pct(MatchCase::BoundaryAmbiguityIII));
}

ReliabilityTable make_reliability_table(const GroupCounts& counts) {
  ReliabilityTable table;
  for (GestureKind k : kExplicitKinds) {
    const int ki = GroupCounts::kind_index(k);
    for (std::size_t c = 0; c < kNumCases; ++c) {
      const std::int64_t n = counts.at(k, static_cast<MatchCase>(c));
      table.by_kind[ki].cases[c] = n;
      table.all.cases[c] += n;
    }
  }
  return table;
}

ReliabilityTable reliability_table(const std::vector<MatchReport>& reports) {
  GroupCounts sum;
  for (const MatchReport& r : reports) {
    for (GestureKind k : kExplicitKinds) {
      for (std::size_t c = 0; c < kNumCases; ++c) {
        sum.at(k, static_cast<MatchCase>(c)) +=
            r.counts.at(k, static_cast<MatchCase>(c));
      }
    }
  }
  return make_reliability_table(sum);
}

RaterTable rater_table(const std::vector<MatchReport>& reports,
                       int min_meals) {
  struct Acc {
    std::int64_t meals = 0, gestures = 0, exact = 0, ba = 0, mistake = 0;
  };
  std::map<std::string, Acc> acc;

  for (const MatchReport& r : reports) {
    ++acc[r.rater_a].meals;
    ++acc[r.rater_b].meals;
    for (const MatchGroup& g : r.groups) {
      auto bucket = [&](Acc& a, std::int64_t n) {
        a.gestures += n;
        switch (g.match_case) {
          case MatchCase::Agreement: a.exact += n; break;
          case MatchCase::BoundaryAmbiguityI:
          case MatchCase::BoundaryAmbiguityII:
          case MatchCase::BoundaryAmbiguityIII: a.ba += n; break;
          case MatchCase::MistakeMissed:
          case MatchCase::MistakeIdentity: a.mistake += n; break;
        }
      };
      bucket(acc[r.rater_a], static_cast<std::int64_t>(g.members_a.size()));
      bucket(acc[r.rater_b], static_cast<std::int64_t>(g.members_b.size()));
    }
  }

  RaterTable table;
  table.min_meals = min_meals;
  for (const auto& [rater, a] : acc) {
    if (a.meals < min_meals) continue;
    table.rows.push_back({rater, a.meals, a.gestures, a.exact, a.ba, a.mistake});
  }
  return table;
}

std::string render_duration_stats(const DurationStats& stats, OutputFormat f) {
  if (f == OutputFormat::Text) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"Type", "#Gestures", "Avg (s)", "Std (s)", "Min (s)", "Max (s)"});
    for (GestureKind k : kDurationKindOrder) {
      const KindDurationStats& s = stats.of(k);
      rows.push_back({std::string(to_string(k)), std::to_string(s.count),
                      fmt1(s.mean_ms / 1000.0), fmt1(s.stddev_ms / 1000.0),
                      fmt1(static_cast<double>(s.min_ms) / 1000.0),
                      fmt1(static_cast<double>(s.max_ms) / 1000.0)});
    }
    return render_text_table(rows);
  }
  if (f == OutputFormat::Csv) {
    std::string out = "kind,count,mean_ms,stddev_ms,min_ms,max_ms\n";
    for (GestureKind k : kDurationKindOrder) {
      const KindDurationStats& s = stats.of(k);
      out += csv_join({std::string(to_string(k)), std::to_string(s.count),
                       fmt("%.10g", s.mean_ms), fmt("%.10g", s.stddev_ms),
                       std::to_string(s.min_ms), std::to_string(s.max_ms)});
    }
    return out;
  }
  std::string out;
  for (GestureKind k : kDurationKindOrder) {
    const KindDurationStats& s = stats.of(k);
    json j{{"table", "durations"},
           {"kind", to_string(k)},
           {"count", s.count},
           {"mean_ms", s.mean_ms},
           {"stddev_ms", s.stddev_ms},
           {"min_ms", s.min_ms},
           {"max_ms", s.max_ms}};
    out += j.dump() + "\n";
  }
  return out;
}

std::string render_reliability(const ReliabilityTable& table, OutputFormat f) {
  // rows: the six cases, overall mistake/BA/agreement, then totals
  std::vector<const ReliabilityColumn*> columns = {&table.all};
  std::vector<std::string> column_names = {"all"};
  for (GestureKind k : kReliabilityKindOrder) {
    columns.push_back(&table.of(k));
    column_names.push_back(std::string(to_string(k)));
  }

  struct Row {
    std::string label;
    std::vector<std::int64_t> counts;
    std::vector<double> percents;
  };
  std::vector<Row> rows;
  for (MatchCase c : kCaseOrder) {
    Row row{std::string(display_name(c)), {}, {}};
    for (const ReliabilityColumn* col : columns) {
      row.counts.push_back(col->count(c));
      row.percents.push_back(col->case_pct(c));
    }
    rows.push_back(std::move(row));
  }
  Row mistake{"Overall mistake", {}, {}};
  Row ba{"Overall BA", {}, {}};
  Row agreement{"Overall agreement", {}, {}};
  Row total{"#Gestures", {}, {}};
  for (const ReliabilityColumn* col : columns) {
    mistake.counts.push_back(col->overall_mistake());
    mistake.percents.push_back(col->overall_mistake_pct());
    ba.counts.push_back(col->overall_ba());
    ba.percents.push_back(col->overall_ba_pct());
    agreement.counts.push_back(col->overall_agreement());
    agreement.percents.push_back(col->overall_agreement_pct());
    total.counts.push_back(col->total());
    total.percents.push_back(100.0);
  }
  rows.push_back(std::move(mistake));
  rows.push_back(std::move(ba));
  rows.push_back(std::move(agreement));
  rows.push_back(std::move(total));

  if (f == OutputFormat::Text) {
    std::vector<std::vector<std::string>> text;
    std::vector<std::string> header = {"Cases"};
    for (const auto& name : column_names) header.push_back(name);
    text.push_back(header);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      std::vector<std::string> line = {rows[r].label};
      const bool total_row = r + 1 == rows.size();
      for (std::size_t c = 0; c < rows[r].counts.size(); ++c) {
        line.push_back(total_row
                           ? std::to_string(rows[r].counts[c])
                           : std::to_string(rows[r].counts[c]) + " (" +
                                 fmt1(rows[r].percents[c]) + "%)");
      }
      text.push_back(std::move(line));
    }
    return render_text_table(text);
  }
  if (f == OutputFormat::Csv) {
    std::string out = "row,column,count,percent\n";
    for (const Row& row : rows) {
      for (std::size_t c = 0; c < columns.size(); ++c) {
        out += csv_join({row.label, column_names[c],
                         std::to_string(row.counts[c]),
                         fmt("%.10g", row.percents[c])});
      }
    }
    return out;
  }
  std::string out;
  for (const Row& row : rows) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      json j{{"table", "reliability"},
             {"row", row.label},
             {"column", column_names[c]},
             {"count", row.counts[c]},
             {"percent", row.percents[c]}};
      out += j.dump() + "\n";
    }
  }
  return out;
}

std::string render_index_table(const IndexTable& table, OutputFormat f) {
  struct Row {
    std::string label;
    std::int64_t one, two;
    double pct_one, pct_two;
  };
  const std::int64_t t1 = table.one_rater.total();
  const std::int64_t t2 = table.two_raters.total();
  const std::vector<Row> rows = {
      {"Agreement", table.one_rater.agreement, table.two_raters.agreement,
       pct(table.one_rater.agreement, t1), pct(table.two_raters.agreement, t2)},
      {"Ambiguity", table.one_rater.ambiguity, table.two_raters.ambiguity,
       pct(table.one_rater.ambiguity, t1), pct(table.two_raters.ambiguity, t2)},
      {"Missed", table.one_rater.missed(), table.two_raters.missed(),
       pct(table.one_rater.missed(), t1), pct(table.two_raters.missed(), t2)},
  };

  if (f == OutputFormat::Text) {
    std::vector<std::vector<std::string>> text;
    text.push_back({"", "One rater", "Two raters"});
    for (const Row& r : rows) {
      text.push_back({r.label,
                      std::to_string(r.one) + " (" + fmt1(r.pct_one) + "%)",
                      std::to_string(r.two) + " (" + fmt1(r.pct_two) + "%)"});
    }
    text.push_back({"#Gestures", std::to_string(t1), std::to_string(t2)});
    return render_text_table(text);
  }
  if (f == OutputFormat::Csv) {
    std::string out = "row,one_rater_count,one_rater_percent,two_raters_count,two_raters_percent\n";
    for (const Row& r : rows) {
      out += csv_join({r.label, std::to_string(r.one), fmt("%.10g", r.pct_one),
                       std::to_string(r.two), fmt("%.10g", r.pct_two)});
    }
    out += csv_join({"#Gestures", std::to_string(t1), "100", std::to_string(t2),
                     "100"});
    return out;
  }
  std::string out;
  for (const Row& r : rows) {
    json j{{"table", "index_comparison"}, {"row", r.label},
           {"one_rater", {{"count", r.one}, {"percent", r.pct_one}}},
           {"two_raters", {{"count", r.two}, {"percent", r.pct_two}}}};
    out += j.dump() + "\n";
  }
  json totals{{"table", "index_comparison"},
              {"row", "#Gestures"},
              {"one_rater", {{"count", t1}}},
              {"two_raters", {{"count", t2}}}};
  out += totals.dump() + "\n";
  return out;
}

std::string render_rater_table(const RaterTable& table, OutputFormat f) {
  auto ipct = [](std::int64_t part, std::int64_t whole) {
    return std::to_string(
        static_cast<std::int64_t>(std::floor(pct(part, whole) + 0.5)));
  };
  if (f == OutputFormat::Text) {
    std::vector<std::vector<std::string>> text;
    text.push_back({"Rater", "#Gestures", "Total agreement", "Agreement", "BA",
                    "Mistake"});
    for (const RaterRow& r : table.rows) {
      text.push_back({r.rater_id, std::to_string(r.gestures),
                      std::to_string(r.total_agreement()) + " (" +
                          ipct(r.total_agreement(), r.gestures) + "%)",
                      std::to_string(r.exact) + " (" +
                          ipct(r.exact, r.gestures) + "%)",
                      std::to_string(r.ba) + " (" + ipct(r.ba, r.gestures) +
                          "%)",
                      std::to_string(r.mistake) + " (" +
                          ipct(r.mistake, r.gestures) + "%)"});
    }
    return render_text_table(text);
  }
  if (f == OutputFormat::Csv) {
    std::string out =
        "rater,meals,gestures,total_agreement,exact,ba,mistake,total_agreement_percent\n";
    for (const RaterRow& r : table.rows) {
      out += csv_join({r.rater_id, std::to_string(r.meals),
                       std::to_string(r.gestures),
                       std::to_string(r.total_agreement()),
                       std::to_string(r.exact), std::to_string(r.ba),
                       std::to_string(r.mistake),
                       fmt("%.10g", pct(r.total_agreement(), r.gestures))});
    }
    return out;
  }
  std::string out;
  for (const RaterRow& r : table.rows) {
    json j{{"table", "raters"},
           {"rater", r.rater_id},
           {"meals", r.meals},
           {"gestures", r.gestures},
           {"total_agreement", r.total_agreement()},
           {"exact", r.exact},
           {"ba", r.ba},
           {"mistake", r.mistake},
           {"total_agreement_percent", pct(r.total_agreement(), r.gestures)}};
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace gestlex
