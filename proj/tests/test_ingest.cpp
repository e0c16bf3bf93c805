#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "gestlex/ingest.hpp"
#include "gestlex/sim.hpp"
#include "testutil.hpp"

using namespace gestlex;
namespace fs = std::filesystem;

namespace {

const TimingConfig kCfg;

bool has_rule(const std::vector<ValidationIssue>& issues, Rule rule) {
  for (const auto& i : issues) {
    if (i.rule == rule) return true;
  }
  return false;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("gestlex_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

void put(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << content;
}

}  // namespace

TEST_CASE("segment parsing accepts the documented row") {
  const auto r = parse_segment_file("kind,start_ms,end_ms\nbite,1000,2900\n",
                                    kCfg, "m", "r");
  REQUIRE(r.timeline.has_value());
  CHECK(r.issues.empty());
  REQUIRE(r.timeline->segments.size() == 1);
  CHECK(r.timeline->segments[0] == Segment{GestureKind::Bite, 1000, 2900});
}

TEST_CASE("segment parsing reports every violation class") {
  SUBCASE("below minimum duration") {
    const auto r = parse_segment_file("kind,start_ms,end_ms\nbite,1000,1500\n",
                                      kCfg, "m", "r");
    CHECK_FALSE(r.timeline.has_value());
    REQUIRE(r.issues.size() == 1);
    CHECK(r.issues[0].rule == Rule::MinDuration);
    CHECK(r.issues[0].ordinal == 0);
  }
  SUBCASE("overlapping rows") {
    const auto r = parse_segment_file(
        "kind,start_ms,end_ms\nbite,1000,3000\nrest,2500,4000\n", kCfg);
    CHECK(has_rule(r.issues, Rule::Overlap));
  }
  SUBCASE("unordered rows") {
    const auto r = parse_segment_file(
        "kind,start_ms,end_ms\nbite,5000,7000\nrest,1000,3000\n", kCfg);
    CHECK(has_rule(r.issues, Rule::Unordered));
  }
  SUBCASE("negative time") {
    const auto r =
        parse_segment_file("kind,start_ms,end_ms\nbite,-5,2000\n", kCfg);
    CHECK(has_rule(r.issues, Rule::NegativeTime));
  }
  SUBCASE("unknown kind") {
    const auto r =
        parse_segment_file("kind,start_ms,end_ms\nchew,0,2000\n", kCfg);
    CHECK(has_rule(r.issues, Rule::BadKind));
  }
  SUBCASE("other is never stored") {
    const auto r =
        parse_segment_file("kind,start_ms,end_ms\nother,0,5000\n", kCfg);
    CHECK(has_rule(r.issues, Rule::BadKind));
  }
  SUBCASE("non-integer time") {
    const auto r =
        parse_segment_file("kind,start_ms,end_ms\nbite,abc,2000\n", kCfg);
    CHECK(has_rule(r.issues, Rule::Syntax));
    CHECK(r.issues[0].message.find("line 2") != std::string::npos);
  }
  SUBCASE("missing header") {
    const auto r = parse_segment_file("bite,1000,2900\n", kCfg);
    CHECK(has_rule(r.issues, Rule::Syntax));
  }
  SUBCASE("all violations reported, no fail-fast") {
    const auto r = parse_segment_file(
        "kind,start_ms,end_ms\nbite,1000,1500\nchew,0,1\nrest,-1,2000\n",
        kCfg);
    CHECK(r.issues.size() >= 3);
  }
}

TEST_CASE("derived other rows in union files are skipped on input") {
  const auto r = parse_segment_file(
      "kind,start_ms,end_ms,case,derived\n"
      "bite,1000,2900,agreement,0\n"
      "other,2900,8000,,1\n",
      kCfg, "m", "u");
  REQUIRE(r.timeline.has_value());
  CHECK(r.timeline->segments.size() == 1);
}

TEST_CASE("comments and blank lines are permitted") {
  const auto r = parse_segment_file(
      "# rater export\nkind,start_ms,end_ms\n\n  # indented comment\n"
      "bite,1000,2900\n",
      kCfg);
  REQUIRE(r.timeline.has_value());
  CHECK(r.timeline->segments.size() == 1);
}

TEST_CASE("sample-index input converts at 15 Hz with round half up") {
  const auto r = parse_segment_file("kind,start_ms,end_ms\nbite,15,45\n", kCfg,
                                    "m", "r", TimeUnit::Samples15Hz);
  REQUIRE(r.timeline.has_value());
  CHECK(r.timeline->segments[0] == Segment{GestureKind::Bite, 1000, 3000});
}

TEST_CASE("index file parsing") {
  SUBCASE("documented row") {
    const auto r = parse_index_file("kind,t_ms,hand\ndrink,41000,dominant\n", "m");
    REQUIRE(r.events.has_value());
    REQUIRE(r.events->size() == 1);
    CHECK((*r.events)[0] ==
          IndexEvent{"m", 41000, GestureKind::Drink, Hand::Dominant});
  }
  SUBCASE("index labels are intake-only") {
    const auto r = parse_index_file("kind,t_ms,hand\nrest,1000,dominant\n");
    CHECK(has_rule(r.issues, Rule::BadKind));
  }
  SUBCASE("nondominant events are accepted and attributed") {
    const auto r =
        parse_index_file("kind,t_ms,hand\nbite,5000,nondominant\n", "m");
    REQUIRE(r.events.has_value());
    CHECK((*r.events)[0].hand == Hand::NonDominant);
  }
  SUBCASE("events are sorted by time") {
    const auto r = parse_index_file(
        "kind,t_ms,hand\nbite,9000,dominant\ndrink,100,dominant\n");
    REQUIRE(r.events.has_value());
    CHECK((*r.events)[0].t == 100);
  }
}

TEST_CASE("validation is total: timeline xor non-empty issues") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> len(0, 120);
  std::uniform_int_distribution<int> byte(0, 255);
  for (int trial = 0; trial < 300; ++trial) {
    std::string noise;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) noise.push_back(static_cast<char>(byte(rng)));
    const auto r = parse_segment_file(noise, kCfg);
    CHECK(r.timeline.has_value() == r.issues.empty());
    const auto ri = parse_index_file(noise);
    CHECK(ri.events.has_value() == ri.issues.empty());
  }
}

TEST_CASE("round trip: parse(serialize(t)) == t") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const Timeline t = testutil::random_timeline(rng, "meal", "r1", 10);
    const auto r = parse_segment_file(serialize_timeline(t), kCfg, "meal", "r1");
    REQUIRE(r.timeline.has_value());
    CHECK(*r.timeline == t);
  }
}

TEST_CASE("index round trip") {
  const std::vector<IndexEvent> events = {
      {"meal", 1000, GestureKind::Bite, Hand::Dominant},
      {"meal", 2000, GestureKind::Drink, Hand::NonDominant},
  };
  const auto r = parse_index_file(serialize_index_events(events), "meal");
  REQUIRE(r.events.has_value());
  CHECK(*r.events == events);
}

TEST_CASE("corpus loading walks the layout") {
  TempDir tmp;
  put(tmp.path / "meal_a" / "rater_r1.csv",
      "kind,start_ms,end_ms\nbite,0,2000\n");
  put(tmp.path / "meal_a" / "rater_r2.csv",
      "kind,start_ms,end_ms\nbite,100,2100\n");
  put(tmp.path / "meal_a" / "index.csv", "kind,t_ms,hand\nbite,500,dominant\n");
  put(tmp.path / "meal_b" / "rater_r1.csv",
      "kind,start_ms,end_ms\nrest,0,5000\n");

  const LoadResult r = load_corpus(tmp.path, kCfg);
  CHECK(r.issues.empty());
  REQUIRE(r.corpus.meals.size() == 2);
  CHECK(r.corpus.meals.at("meal_a").size() == 2);
  CHECK(r.corpus.meals.at("meal_a")[0].rater_id == "r1");
  CHECK(r.corpus.meals.at("meal_b").size() == 1);
  CHECK(r.corpus.index_events.at("meal_a").size() == 1);

  SUBCASE("unrecognized files are reported, not dropped") {
    put(tmp.path / "meal_b" / "notes.txt", "hello");
    const LoadResult r2 = load_corpus(tmp.path, kCfg);
    REQUIRE(r2.issues.size() == 1);
    CHECK(r2.issues[0].rule == Rule::Syntax);
    CHECK(r2.issues[0].message.find("notes.txt") != std::string::npos);
  }
  SUBCASE("provenance metadata is recognized") {
    put(tmp.path / "meal_b" / "provenance.csv", "segment_ordinal\n");
    CHECK(load_corpus(tmp.path, kCfg).issues.empty());
  }
  SUBCASE("issues carry meal and rater ids") {
    put(tmp.path / "meal_b" / "rater_r9.csv",
        "kind,start_ms,end_ms\nbite,0,10\n");
    const LoadResult r2 = load_corpus(tmp.path, kCfg);
    REQUIRE(r2.issues.size() == 1);
    CHECK(r2.issues[0].meal_id == "meal_b");
    CHECK(r2.issues[0].rater_id == "r9");
  }
}

TEST_CASE("missing corpus root is an issue") {
  const LoadResult r = load_corpus("/nonexistent/gestlex", kCfg);
  REQUIRE_FALSE(r.issues.empty());
  CHECK(r.corpus.meals.empty());
}

TEST_CASE("write_corpus round trips through load_corpus") {
  TempDir tmp;
  std::mt19937_64 rng(11);
  Corpus corpus;
  corpus.meals["meal_x"] = {testutil::random_timeline(rng, "meal_x", "r1", 8),
                            testutil::random_timeline(rng, "meal_x", "r2", 8)};
  corpus.index_events["meal_x"] = {
      {"meal_x", 1234, GestureKind::Bite, Hand::Dominant}};
  write_corpus(tmp.path / "corpus", corpus);
  const LoadResult r = load_corpus(tmp.path / "corpus", kCfg);
  CHECK(r.issues.empty());
  CHECK(r.corpus.meals == corpus.meals);
  CHECK(r.corpus.index_events == corpus.index_events);
}
