#include "gestlex/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

namespace gestlex {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(pos)));
      break;
    }
    out.push_back(trim(line.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::int64_t v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

struct Line {
  int number = 0;  // 1-based
  std::string_view text;
};

// Content lines only: blank lines and `#` comments are dropped.
std::vector<Line> content_lines(std::string_view text) {
  std::vector<Line> out;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    ++number;
    const std::string_view line = trim(text.substr(pos, end - pos));
    if (!line.empty() && line.front() != '#') {
      out.push_back({number, line});
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

struct ColumnMap {
  int kind = 0;
  int start = 1;
  int end = 2;
  int derived = -1;  // optional column in union output files
  int required() const { return std::max({kind, start, end}) + 1; }
};

// Returns the column layout if the first content line is a header, and
// reports a Syntax issue (keeping defaults) when the header is malformed
// or missing.
ColumnMap read_segment_header(const std::vector<Line>& lines,
                              std::size_t& first_row,
                              std::vector<ValidationIssue>& issues,
                              const std::string& meal_id,
                              const std::string& rater_id) {
  ColumnMap cols;
  first_row = 0;
  if (lines.empty()) return cols;
  const auto fields = split_fields(lines[0].text);
  const bool looks_like_header =
      std::find(fields.begin(), fields.end(), "kind") != fields.end();
  if (!looks_like_header) {
    issues.push_back({meal_id, rater_id, -1, Rule::Syntax,
                      "line 1: missing header (expected kind,start_ms,end_ms)"});
    return cols;
  }
  first_row = 1;
  cols.kind = cols.start = cols.end = -1;
  for (int i = 0; i < static_cast<int>(fields.size()); ++i) {
    if (fields[i] == "kind") cols.kind = i;
    else if (fields[i] == "start_ms") cols.start = i;
    else if (fields[i] == "end_ms") cols.end = i;
    else if (fields[i] == "derived") cols.derived = i;
    // unknown columns (e.g. case) are carried by writers and ignored here
  }
  if (cols.kind < 0 || cols.start < 0 || cols.end < 0) {
    issues.push_back({meal_id, rater_id, -1, Rule::Syntax,
                      "line 1: header must name kind, start_ms and end_ms"});
    cols = ColumnMap{};
    first_row = 1;
  }
  return cols;
}

TimeMs convert_time(std::int64_t raw, TimeUnit unit) {
  return unit == TimeUnit::Samples15Hz && raw >= 0 ? samples15hz_to_ms(raw)
                                                   : raw;
}

std::string line_prefix(int number) {
  return "line " + std::to_string(number) + ": ";
}

}  // namespace

std::string_view to_string(Rule r) {
  switch (r) {
    case Rule::Syntax: return "Syntax";
    case Rule::NegativeTime: return "NegativeTime";
    case Rule::BadKind: return "BadKind";
    case Rule::MinDuration: return "MinDuration";
    case Rule::Unordered: return "Unordered";
    case Rule::Overlap: return "Overlap";
  }
  return "?";
}

std::string format_issue(const ValidationIssue& issue) {
  std::ostringstream os;
  os << (issue.meal_id.empty() ? "-" : issue.meal_id) << "/"
     << (issue.rater_id.empty() ? "-" : issue.rater_id) << " ["
     << to_string(issue.rule) << "]";
  if (issue.ordinal >= 0) os << " segment " << issue.ordinal;
  os << ": " << issue.message;
  return os.str();
}

std::vector<ValidationIssue> validate_segments(
    const std::vector<Segment>& segments, const TimingConfig& cfg,
    const std::string& meal_id, const std::string& rater_id) {
  std::vector<ValidationIssue> issues;
  auto add = [&](int ordinal, Rule rule, std::string msg) {
    issues.push_back({meal_id, rater_id, ordinal, rule, std::move(msg)});
  };

  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& s = segments[i];
    if (s.start < 0 || s.end < 0) {
      add(static_cast<int>(i), Rule::NegativeTime,
          "negative time point (" + std::to_string(s.start) + "," +
              std::to_string(s.end) + ")");
      continue;
    }
    const TimeMs min = cfg.min_duration_ms(s.kind);
    if (s.duration() < min) {
      add(static_cast<int>(i), Rule::MinDuration,
          std::string(to_string(s.kind)) + " lasts " +
              std::to_string(s.duration()) + " ms, minimum is " +
              std::to_string(min) + " ms");
    }
    if (i > 0 && s.start < segments[i - 1].start) {
      add(static_cast<int>(i), Rule::Unordered,
          "starts at " + std::to_string(s.start) + " before previous row (" +
              std::to_string(segments[i - 1].start) + ")");
    }
  }

  // Overlap is checked on a start-sorted view so it is meaningful even when
  // the file is also unordered.
  std::vector<std::size_t> order(segments.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return segments[l].start < segments[r].start;
  });
  TimeMs max_end = std::numeric_limits<TimeMs>::min();
  std::size_t max_end_at = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Segment& s = segments[order[k]];
    if (k > 0 && s.start < max_end) {
      add(static_cast<int>(order[k]), Rule::Overlap,
          "[" + std::to_string(s.start) + "," + std::to_string(s.end) +
              ") overlaps segment " + std::to_string(max_end_at));
    }
    if (s.end > max_end) {
      max_end = s.end;
      max_end_at = order[k];
    }
  }
  return issues;
}

SegmentParseResult parse_segment_file(std::string_view text,
                                      const TimingConfig& cfg,
                                      std::string meal_id,
                                      std::string rater_id, TimeUnit unit) {
  SegmentParseResult result;
  const auto lines = content_lines(text);
  std::size_t first_row = 0;
  const ColumnMap cols =
      read_segment_header(lines, first_row, result.issues, meal_id, rater_id);

  std::vector<Segment> segments;
  for (std::size_t li = first_row; li < lines.size(); ++li) {
    const auto& line = lines[li];
    const auto fields = split_fields(line.text);
    if (static_cast<int>(fields.size()) < cols.required()) {
      result.issues.push_back(
          {meal_id, rater_id, -1, Rule::Syntax,
           line_prefix(line.number) + "expected at least " +
               std::to_string(cols.required()) + " fields, got " +
               std::to_string(fields.size())});
      continue;
    }
    const std::string_view kind_field = fields[cols.kind];
    const bool derived_row =
        cols.derived >= 0 && cols.derived < static_cast<int>(fields.size()) &&
        fields[cols.derived] == "1";
    const auto kind = parse_kind(kind_field);
    if (!kind) {
      result.issues.push_back({meal_id, rater_id, -1, Rule::BadKind,
                               line_prefix(line.number) + "unknown kind '" +
                                   std::string(kind_field) + "'"});
      continue;
    }
    if (*kind == GestureKind::Other) {
      if (derived_row) continue;  // re-derivable, skip on input
      result.issues.push_back(
          {meal_id, rater_id, -1, Rule::BadKind,
           line_prefix(line.number) +
               "'other' is derived from gaps and never stored"});
      continue;
    }
    const auto start_raw = parse_int(fields[cols.start]);
    const auto end_raw = parse_int(fields[cols.end]);
    if (!start_raw || !end_raw) {
      result.issues.push_back({meal_id, rater_id, -1, Rule::Syntax,
                               line_prefix(line.number) +
                                   "start/end must be integers"});
      continue;
    }
    segments.push_back(
        {*kind, convert_time(*start_raw, unit), convert_time(*end_raw, unit)});
  }

  auto semantic = validate_segments(segments, cfg, meal_id, rater_id);
  result.issues.insert(result.issues.end(),
                       std::make_move_iterator(semantic.begin()),
                       std::make_move_iterator(semantic.end()));
  if (result.issues.empty()) {
    result.timeline =
        Timeline{std::move(meal_id), std::move(rater_id), std::move(segments)};
  }
  return result;
}

IndexParseResult parse_index_file(std::string_view text, std::string meal_id,
                                  TimeUnit unit) {
  IndexParseResult result;
  const auto lines = content_lines(text);
  std::size_t first_row = 0;
  if (!lines.empty()) {
    const auto fields = split_fields(lines[0].text);
    if (std::find(fields.begin(), fields.end(), "kind") != fields.end()) {
      first_row = 1;
    } else {
      result.issues.push_back({meal_id, "", -1, Rule::Syntax,
                               "line 1: missing header (expected kind,t_ms,hand)"});
    }
  }

  std::vector<IndexEvent> events;
  for (std::size_t li = first_row; li < lines.size(); ++li) {
    const auto& line = lines[li];
    const auto fields = split_fields(line.text);
    if (fields.size() < 3) {
      result.issues.push_back({meal_id, "", -1, Rule::Syntax,
                               line_prefix(line.number) +
                                   "expected 3 fields, got " +
                                   std::to_string(fields.size())});
      continue;
    }
    const auto kind = parse_kind(fields[0]);
    if (!kind || !is_intake(*kind)) {
      result.issues.push_back({meal_id, "", -1, Rule::BadKind,
                               line_prefix(line.number) +
                                   "index labels are intake-only, got '" +
                                   std::string(fields[0]) + "'"});
      continue;
    }
    const auto t_raw = parse_int(fields[1]);
    if (!t_raw) {
      result.issues.push_back({meal_id, "", -1, Rule::Syntax,
                               line_prefix(line.number) +
                                   "t_ms must be an integer"});
      continue;
    }
    const auto hand = parse_hand(fields[2]);
    if (!hand) {
      result.issues.push_back({meal_id, "", -1, Rule::Syntax,
                               line_prefix(line.number) + "unknown hand '" +
                                   std::string(fields[2]) + "'"});
      continue;
    }
    const TimeMs t = convert_time(*t_raw, unit);
    if (t < 0) {
      result.issues.push_back({meal_id, "", -1, Rule::NegativeTime,
                               line_prefix(line.number) + "negative time " +
                                   std::to_string(t)});
      continue;
    }
    events.push_back({meal_id, t, *kind, *hand});
  }

  if (result.issues.empty()) {
    std::stable_sort(events.begin(), events.end(),
                     [](const IndexEvent& a, const IndexEvent& b) {
                       return a.t < b.t;
                     });
    result.events = std::move(events);
  }
  return result;
}

std::string serialize_timeline(const Timeline& t) {
  std::string out = "kind,start_ms,end_ms\n";
  for (const Segment& s : t.segments) {
    out += std::string(to_string(s.kind)) + "," + std::to_string(s.start) +
           "," + std::to_string(s.end) + "\n";
  }
  return out;
}

std::string serialize_index_events(const std::vector<IndexEvent>& events) {
  std::string out = "kind,t_ms,hand\n";
  for (const IndexEvent& e : events) {
    out += std::string(to_string(e.kind)) + "," + std::to_string(e.t) + "," +
           std::string(to_string(e.hand)) + "\n";
  }
  return out;
}

namespace {

std::optional<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// rater_<id>.csv -> id
std::optional<std::string> rater_id_from_name(const std::string& name) {
  constexpr std::string_view prefix = "rater_";
  constexpr std::string_view suffix = ".csv";
  if (name.size() <= prefix.size() + suffix.size()) return std::nullopt;
  if (name.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
  if (name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0) {
    return std::nullopt;
  }
  return name.substr(prefix.size(),
                     name.size() - prefix.size() - suffix.size());
}

}  // namespace

LoadResult load_corpus(const std::filesystem::path& root,
                       const TimingConfig& cfg, TimeUnit unit) {
  LoadResult result;
  std::error_code ec;
  if (!std::filesystem::is_directory(root, ec)) {
    result.issues.push_back({"", "", -1, Rule::Syntax,
                             "corpus root is not a directory: " +
                                 root.string()});
    return result;
  }

  std::vector<std::filesystem::path> meal_dirs;
  for (const auto& entry : std::filesystem::directory_iterator(root)) {
    if (entry.is_directory()) {
      meal_dirs.push_back(entry.path());
    } else {
      result.issues.push_back({"", "", -1, Rule::Syntax,
                               "unrecognized file in corpus root: " +
                                   entry.path().filename().string()});
    }
  }
  std::sort(meal_dirs.begin(), meal_dirs.end());

  for (const auto& dir : meal_dirs) {
    const std::string meal_id = dir.filename().string();
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    for (const auto& file : files) {
      const std::string name = file.filename().string();
      if (name == "provenance.csv") continue;  // simulator metadata
      const auto content = read_file(file);
      if (const auto rater = rater_id_from_name(name)) {
        if (!content) {
          result.issues.push_back({meal_id, *rater, -1, Rule::Syntax,
                                   "cannot read " + file.string()});
          continue;
        }
        auto parsed = parse_segment_file(*content, cfg, meal_id, *rater, unit);
        result.issues.insert(result.issues.end(), parsed.issues.begin(),
                             parsed.issues.end());
        if (parsed.timeline) {
          result.corpus.meals[meal_id].push_back(std::move(*parsed.timeline));
        }
      } else if (name == "index.csv") {
        if (!content) {
          result.issues.push_back({meal_id, "", -1, Rule::Syntax,
                                   "cannot read " + file.string()});
          continue;
        }
        auto parsed = parse_index_file(*content, meal_id, unit);
        result.issues.insert(result.issues.end(), parsed.issues.begin(),
                             parsed.issues.end());
        if (parsed.events) {
          result.corpus.index_events[meal_id] = std::move(*parsed.events);
        }
      } else {
        result.issues.push_back({meal_id, "", -1, Rule::Syntax,
                                 "unrecognized file: " + name});
      }
    }
  }
  return result;
}

void write_corpus(const std::filesystem::path& root, const Corpus& corpus) {
  std::filesystem::create_directories(root);
  for (const auto& [meal_id, timelines] : corpus.meals) {
    const auto dir = root / meal_id;
    std::filesystem::create_directories(dir);
    for (const Timeline& t : timelines) {
      std::ofstream out(dir / ("rater_" + t.rater_id + ".csv"),
                        std::ios::binary | std::ios::trunc);
      out << serialize_timeline(t);
    }
    const auto events = corpus.index_events.find(meal_id);
    if (events != corpus.index_events.end()) {
      std::ofstream out(dir / "index.csv", std::ios::binary | std::ios::trunc);
      out << serialize_index_events(events->second);
    }
  }
}

}  // namespace gestlex
