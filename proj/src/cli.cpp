#include "gestlex/cli.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace gestlex {
namespace {

using nlohmann::json;

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

std::optional<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Meal-level fan-out; results land in index-addressed slots so the merge
// order never depends on scheduling.
template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::optional<Corpus> load_or_report(const RunConfig& cfg, std::ostream& err) {
  LoadResult load = load_corpus(cfg.corpus_root, cfg.timing, cfg.unit);
  if (!load.issues.empty()) {
    for (const ValidationIssue& issue : load.issues) {
      err << format_issue(issue) << "\n";
    }
    err << "corpus failed validation with " << load.issues.size()
        << " issue(s)\n";
    return std::nullopt;
  }
  if (load.corpus.meals.empty()) {
    err << "no meals found in " << cfg.corpus_root.string() << "\n";
    return std::nullopt;
  }
  return std::move(load.corpus);
}

const char* table_extension(OutputFormat f) {
  switch (f) {
    case OutputFormat::Text: return ".txt";
    case OutputFormat::Csv: return ".csv";
    case OutputFormat::JsonLines: return ".jsonl";
  }
  return ".txt";
}

std::string span_list(const std::vector<Segment>& segments) {
  std::string out;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (i > 0) out += "|";
    out += std::to_string(segments[i].start) + "-" +
           std::to_string(segments[i].end);
  }
  return out;
}

}  // namespace

std::vector<IndexEvent> dominant_only(const std::vector<IndexEvent>& events) {
  std::vector<IndexEvent> out;
  for (const IndexEvent& e : events) {
    if (e.hand == Hand::Dominant) out.push_back(e);
  }
  return out;
}

MealMatchOutput match_meal(const std::vector<Timeline>& raters,
                           const std::vector<IndexEvent>& events,
                           const TimingConfig& cfg) {
  MealMatchOutput out;
  std::vector<Timeline> sorted = raters;
  std::sort(sorted.begin(), sorted.end(),
            [](const Timeline& a, const Timeline& b) {
              return a.rater_id < b.rater_id;
            });
  const std::vector<IndexEvent> dom = dominant_only(events);

  if (sorted.size() == 1) {
    out.single_rater = true;
    out.union_timeline = sorted[0];
    out.union_timeline.rater_id = "union";
    return out;
  }

  MatchReport primary = match_pair(sorted[0], sorted[1], dom, cfg);
  out.union_timeline = primary.union_timeline;
  out.union_cases = primary.union_cases;
  for (std::size_t r = 2; r < sorted.size(); ++r) {
    out.probes.push_back(match_pair(out.union_timeline, sorted[r], dom, cfg));
  }
  out.primary = std::move(primary);
  return out;
}

std::string serialize_union_file(const Timeline& union_timeline,
                                 const std::vector<MatchCase>& cases,
                                 const TimingConfig& cfg) {
  struct Row {
    Segment seg;
    std::string case_label;
    bool derived;
  };
  std::vector<Row> rows;
  for (std::size_t i = 0; i < union_timeline.segments.size(); ++i) {
    rows.push_back({union_timeline.segments[i],
                    i < cases.size() ? std::string(to_string(cases[i])) : "",
                    false});
  }
  for (const Segment& s : derive_other_segments(union_timeline, cfg)) {
    rows.push_back({s, "", true});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.seg.start < b.seg.start;
  });

  std::string out = "kind,start_ms,end_ms,case,derived\n";
  for (const Row& r : rows) {
    out += std::string(to_string(r.seg.kind)) + "," +
           std::to_string(r.seg.start) + "," + std::to_string(r.seg.end) +
           "," + r.case_label + "," + (r.derived ? "1" : "0") + "\n";
  }
  return out;
}

std::string serialize_match_groups(const std::vector<MatchReport>& reports,
                                   OutputFormat format) {
  if (format == OutputFormat::JsonLines) {
    std::string out;
    for (const MatchReport& r : reports) {
      for (const MatchGroup& g : r.groups) {
        json members_a = json::array();
        for (const Segment& s : g.members_a) {
          members_a.push_back({{"start_ms", s.start}, {"end_ms", s.end}});
        }
        json members_b = json::array();
        for (const Segment& s : g.members_b) {
          members_b.push_back({{"start_ms", s.start}, {"end_ms", s.end}});
        }
        json j{{"meal", r.meal_id},
               {"rater_a", r.rater_a},
               {"rater_b", r.rater_b},
               {"kind", to_string(g.kind)},
               {"case", to_string(g.match_case)},
               {"members_a", members_a},
               {"members_b", members_b}};
        if (g.union_segment) {
          j["union"] = {{"start_ms", g.union_segment->start},
                        {"end_ms", g.union_segment->end}};
        }
        if (g.attributed_rater) j["attributed_rater"] = *g.attributed_rater;
        if (!g.note.empty()) j["note"] = g.note;
        out += j.dump() + "\n";
      }
    }
    return out;
  }
  std::string out =
      "meal,rater_a,rater_b,kind,case,members_a,members_b,union_start_ms,"
      "union_end_ms,attributed_rater,note\n";
  for (const MatchReport& r : reports) {
    for (const MatchGroup& g : r.groups) {
      out += r.meal_id + "," + r.rater_a + "," + r.rater_b + "," +
             std::string(to_string(g.kind)) + "," +
             std::string(to_string(g.match_case)) + "," +
             span_list(g.members_a) + "," + span_list(g.members_b) + ",";
      if (g.union_segment) {
        out += std::to_string(g.union_segment->start) + "," +
               std::to_string(g.union_segment->end);
      } else {
        out += ",";
      }
      out += "," + (g.attributed_rater ? *g.attributed_rater : "") + "," +
             g.note + "\n";
    }
  }
  return out;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const LoadResult load = load_corpus(cfg.corpus_root, cfg.timing, cfg.unit);
  for (const ValidationIssue& issue : load.issues) {
    out << format_issue(issue) << "\n";
  }
  if (!load.issues.empty()) {
    out << load.issues.size() << " issue(s) found\n";
    return kExitValidation;
  }
  if (load.corpus.meals.empty()) {
    err << "no meals found in " << cfg.corpus_root.string() << "\n";
    return kExitValidation;
  }
  std::size_t timelines = 0;
  for (const auto& [meal, list] : load.corpus.meals) timelines += list.size();
  out << "ok: " << load.corpus.meals.size() << " meal(s), " << timelines
      << " timeline(s), no issues\n";
  return kExitOk;
}

int cmd_stats(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto corpus = load_or_report(cfg, err);
  if (!corpus) return kExitValidation;
  const DurationStats stats = duration_stats(*corpus, cfg.timing);
  const std::string rendered = render_duration_stats(stats, cfg.format);
  out << rendered;
  if (cfg.out_dir) {
    write_file(*cfg.out_dir /
                   (std::string("durations") + table_extension(cfg.format)),
               rendered);
  }
  return kExitOk;
}

int cmd_match(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto corpus = load_or_report(cfg, err);
  if (!corpus) return kExitValidation;

  std::vector<std::string> meal_ids;
  meal_ids.reserve(corpus->meals.size());
  for (const auto& [meal, list] : corpus->meals) meal_ids.push_back(meal);

  static const std::vector<IndexEvent> kNoEvents;
  std::vector<MealMatchOutput> outputs(meal_ids.size());
  parallel_for(meal_ids.size(), cfg.jobs, [&](std::size_t i) {
    const auto& raters = corpus->meals.at(meal_ids[i]);
    const auto ev = corpus->index_events.find(meal_ids[i]);
    outputs[i] = match_meal(
        raters, ev != corpus->index_events.end() ? ev->second : kNoEvents,
        cfg.timing);
  });

  std::vector<MatchReport> reports;
  std::vector<MatchReport> probes;
  int single_rater = 0;
  for (MealMatchOutput& o : outputs) {
    if (o.primary) reports.push_back(*o.primary);
    for (MatchReport& p : o.probes) probes.push_back(p);
    if (o.single_rater) ++single_rater;
  }

  out << "Inter-rater reliability: " << reports.size()
      << " doubly-labeled meal(s)";
  if (single_rater > 0) {
    out << ", " << single_rater << " single-rater union(s) passed through";
  }
  out << "\n";
  const ReliabilityTable table = reliability_table(reports);
  out << render_reliability(table, cfg.format);

  const RaterTable raters_table = rater_table(reports, cfg.min_meals);
  if (!raters_table.rows.empty()) {
    out << "\nPer-rater reliability (raters with at least " << cfg.min_meals
        << " meal(s))\n";
    out << render_rater_table(raters_table, cfg.format);
  }
  if (!probes.empty()) {
    out << "\nExtra raters probed against the union: " << probes.size()
        << " pairing(s)\n";
    out << render_reliability(reliability_table(probes), cfg.format);
  }

  if (cfg.out_dir) {
    for (std::size_t i = 0; i < meal_ids.size(); ++i) {
      write_file(*cfg.out_dir / meal_ids[i] / "union.csv",
                 serialize_union_file(outputs[i].union_timeline,
                                      outputs[i].union_cases, cfg.timing));
    }
    const bool jsonl = cfg.format == OutputFormat::JsonLines;
    write_file(*cfg.out_dir / (jsonl ? "match_groups.jsonl" : "match_groups.csv"),
               serialize_match_groups(reports, cfg.format));
    write_file(*cfg.out_dir /
                   (std::string("reliability") + table_extension(cfg.format)),
               render_reliability(table, cfg.format));
    write_file(*cfg.out_dir /
                   (std::string("raters") + table_extension(cfg.format)),
               render_rater_table(raters_table, cfg.format));
    if (!probes.empty()) {
      write_file(
          *cfg.out_dir / (jsonl ? "probe_groups.jsonl" : "probe_groups.csv"),
          serialize_match_groups(probes, cfg.format));
    }
  }
  return kExitOk;
}

int cmd_index_compare(const RunConfig& cfg, std::ostream& out,
                      std::ostream& err) {
  const auto corpus = load_or_report(cfg, err);
  if (!corpus) return kExitValidation;

  std::vector<std::string> meal_ids;
  for (const auto& [meal, list] : corpus->meals) meal_ids.push_back(meal);

  struct MealResult {
    bool two_raters = false;
    IndexCompareResult compared;
  };
  static const std::vector<IndexEvent> kNoEvents;
  std::vector<MealResult> results(meal_ids.size());
  parallel_for(meal_ids.size(), cfg.jobs, [&](std::size_t i) {
    const auto& raters = corpus->meals.at(meal_ids[i]);
    const auto ev_it = corpus->index_events.find(meal_ids[i]);
    const std::vector<IndexEvent>& events =
        ev_it != corpus->index_events.end() ? ev_it->second : kNoEvents;
    const std::vector<IndexEvent> dom = dominant_only(events);
    MealResult& r = results[i];
    if (raters.size() == 1) {
      r.compared = compare_to_index(raters[0], dom, cfg.index_options);
    } else {
      r.two_raters = true;
      const MealMatchOutput matched = match_meal(raters, events, cfg.timing);
      r.compared =
          compare_to_index(matched.union_timeline, dom, cfg.index_options);
    }
  });

  IndexTable table;
  for (const MealResult& r : results) {
    (r.two_raters ? table.two_raters : table.one_rater) += r.compared.counts;
  }
  const std::string rendered = render_index_table(table, cfg.format);
  out << rendered;

  if (cfg.out_dir) {
    write_file(*cfg.out_dir /
                   (std::string("index_table") + table_extension(cfg.format)),
               rendered);
    std::string outcomes =
        "meal,coverage,outcome,kind,gesture_start_ms,gesture_end_ms,event_ts\n";
    for (std::size_t i = 0; i < meal_ids.size(); ++i) {
      for (const IndexMatchOutcome& o : results[i].compared.outcomes) {
        std::string events_text;
        for (std::size_t e = 0; e < o.events.size(); ++e) {
          if (e > 0) events_text += "|";
          events_text += std::to_string(o.events[e].t);
        }
        outcomes += meal_ids[i] + "," +
                    (results[i].two_raters ? "2" : "1") + "," +
                    std::string(to_string(o.outcome)) + "," +
                    (o.gesture ? std::string(to_string(o.gesture->kind)) : "") +
                    "," +
                    (o.gesture ? std::to_string(o.gesture->start) : "") + "," +
                    (o.gesture ? std::to_string(o.gesture->end) : "") + "," +
                    events_text + "\n";
      }
    }
    write_file(*cfg.out_dir / "index_outcomes.csv", outcomes);
  }
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg,
                 const std::optional<std::filesystem::path>& config_path,
                 std::optional<int> n_meals_override, std::ostream& out,
                 std::ostream& err) {
  if (!cfg.out_dir) {
    err << "simulate requires --out <directory>\n";
    return kExitUsage;
  }
  SimConfig sim_config;
  if (config_path) {
    const auto text = read_file(*config_path);
    if (!text) {
      err << "cannot read config file " << config_path->string() << "\n";
      return kExitUsage;
    }
    try {
      sim_config = parse_sim_config(*text);
    } catch (const std::runtime_error& e) {
      err << config_path->string() << ": " << e.what() << "\n";
      return kExitUsage;
    }
  }
  if (n_meals_override) sim_config.n_meals = *n_meals_override;
  if (sim_config.n_meals <= 0) {
    err << "meal count must be positive\n";
    return kExitUsage;
  }
  try {
    const SimulatedCorpus sim =
        simulate_corpus(sim_config.model, sim_config.profile,
                        sim_config.n_meals, cfg.timing, cfg.seed);
    write_simulated_corpus(*cfg.out_dir, sim);
  } catch (const std::invalid_argument& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }
  out << "wrote " << sim_config.n_meals << " simulated meal(s) to "
      << cfg.out_dir->string() << " (seed " << cfg.seed << ")\n";
  return kExitOk;
}

}  // namespace gestlex
