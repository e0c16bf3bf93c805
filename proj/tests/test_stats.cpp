#include <doctest.h>

#include <algorithm>
#include <random>

#include "gestlex/sim.hpp"
#include "gestlex/stats.hpp"
#include "testutil.hpp"

using namespace gestlex;

namespace {

// Reference two-rater reliability breakdown, per kind and case.
GroupCounts reference_counts() {
  GroupCounts c;
  auto set = [&](MatchCase mc, std::int64_t bite, std::int64_t drink,
                 std::int64_t rest, std::int64_t utensiling) {
    c.at(GestureKind::Bite, mc) = bite;
    c.at(GestureKind::Drink, mc) = drink;
    c.at(GestureKind::Rest, mc) = rest;
    c.at(GestureKind::Utensiling, mc) = utensiling;
  };
  set(MatchCase::Agreement, 5814, 594, 2926, 3850);
  set(MatchCase::BoundaryAmbiguityI, 136, 160, 548, 186);
  set(MatchCase::BoundaryAmbiguityII, 21, 73, 443, 247);
  set(MatchCase::BoundaryAmbiguityIII, 478, 44, 232, 496);
  set(MatchCase::MistakeMissed, 23, 9, 700, 347);
  set(MatchCase::MistakeIdentity, 14, 8, 117, 110);
  return c;
}

}  // namespace

TEST_CASE("reliability fixture reproduces the reference percentages") {
  const ReliabilityTable t = make_reliability_table(reference_counts());

  CHECK(t.all.total() == 17576);
  CHECK(t.all.count(MatchCase::Agreement) == 13184);
  CHECK(t.all.overall_ba() == 3064);
  CHECK(t.all.overall_mistake() == 1328);
  CHECK(t.all.overall_agreement() == 16248);

  CHECK(t.all.case_pct(MatchCase::Agreement) ==
        doctest::Approx(75.0).epsilon(0.0007));
  CHECK(t.all.overall_ba_pct() == doctest::Approx(17.5).epsilon(0.003));
  CHECK(t.all.overall_mistake_pct() == doctest::Approx(7.5).epsilon(0.007));
  CHECK(t.all.overall_agreement_pct() == doctest::Approx(92.4).epsilon(0.0006));

  CHECK(t.of(GestureKind::Bite).overall_agreement_pct() ==
        doctest::Approx(99.4).epsilon(0.0005));
  CHECK(t.of(GestureKind::Drink).overall_agreement_pct() ==
        doctest::Approx(98.1).epsilon(0.0005));
  CHECK(t.of(GestureKind::Rest).overall_agreement_pct() ==
        doctest::Approx(83.5).epsilon(0.001));
  CHECK(t.of(GestureKind::Utensiling).overall_agreement_pct() ==
        doctest::Approx(91.3).epsilon(0.001));

  // column conservation: the six cases sum to the column total
  for (GestureKind k : kExplicitKinds) {
    std::int64_t sum = 0;
    for (std::size_t c = 0; c < kNumCases; ++c) {
      sum += t.of(k).count(static_cast<MatchCase>(c));
    }
    CHECK(sum == t.of(k).total());
  }
  // exact + BA + mistake covers the column within rounding slack
  const double covered = t.all.case_pct(MatchCase::Agreement) +
                         t.all.overall_ba_pct() + t.all.overall_mistake_pct();
  CHECK(covered == doctest::Approx(100.0).epsilon(0.002));
}

TEST_CASE("empty report list renders zeros") {
  const ReliabilityTable t = reliability_table({});
  CHECK(t.all.total() == 0);
  CHECK(t.all.case_pct(MatchCase::Agreement) == 0.0);
  CHECK(t.all.overall_agreement_pct() == 0.0);
  const std::string text = render_reliability(t, OutputFormat::Text);
  CHECK(text.find("0 (0.0%)") != std::string::npos);
}

TEST_CASE("index table fixtures reproduce the reference columns") {
  IndexTable t;
  t.one_rater.agreement = 16029;
  t.one_rater.ambiguity = 93;
  t.one_rater.missed_gestures = 862;
  t.two_raters.agreement = 3461;
  t.two_raters.ambiguity = 21;
  t.two_raters.missed_gestures = 128;

  CHECK(t.one_rater.total() == 16984);
  CHECK(t.two_raters.total() == 3610);
  CHECK(pct(t.one_rater.agreement, t.one_rater.total()) ==
        doctest::Approx(94.4).epsilon(0.0011));
  CHECK(pct(t.one_rater.ambiguity, t.one_rater.total()) ==
        doctest::Approx(0.5).epsilon(0.1));
  CHECK(pct(t.one_rater.missed(), t.one_rater.total()) ==
        doctest::Approx(5.0).epsilon(0.016));
  CHECK(pct(t.two_raters.agreement, t.two_raters.total()) ==
        doctest::Approx(95.8).epsilon(0.0008));
  CHECK(pct(t.two_raters.ambiguity, t.two_raters.total()) ==
        doctest::Approx(0.6).epsilon(0.04));
  CHECK(pct(t.two_raters.missed(), t.two_raters.total()) ==
        doctest::Approx(3.6).epsilon(0.016));

  SUBCASE("zero outcomes render zeros") {
    const IndexTable empty;
    const std::string text = render_index_table(empty, OutputFormat::Text);
    CHECK(text.find("0 (0.0%)") != std::string::npos);
  }
}

TEST_CASE("rater row arithmetic matches the reference JP row") {
  RaterRow jp{"JP", 9, 818, 656, 144, 18};
  CHECK(jp.total_agreement() == 800);
  const double p = pct(jp.total_agreement(), jp.gestures);
  CHECK(std::floor(p + 0.5) == 98.0);
  RaterTable table;
  table.rows.push_back(jp);
  const std::string text = render_rater_table(table, OutputFormat::Text);
  CHECK(text.find("800 (98%)") != std::string::npos);
  CHECK(text.find("656 (80%)") != std::string::npos);
}

TEST_CASE("rater table counts by ownership and filters by meal count") {
  // one meal, two raters: r1 labeled both gestures, r2 missed one
  Timeline a{"m", "r1",
             {{GestureKind::Bite, 0, 2000}, {GestureKind::Rest, 5000, 9000}}};
  Timeline b{"m", "r2", {{GestureKind::Bite, 0, 2000}}};
  const MatchReport r = match_pair(a, b, {}, TimingConfig{});
  SUBCASE("counts partition each rater's own gestures") {
    const RaterTable t = rater_table({r}, 1);
    REQUIRE(t.rows.size() == 2);
    const RaterRow& r1 = t.rows[0].rater_id == "r1" ? t.rows[0] : t.rows[1];
    const RaterRow& r2 = t.rows[0].rater_id == "r2" ? t.rows[0] : t.rows[1];
    CHECK(r1.gestures == 2);
    CHECK(r1.exact == 1);
    CHECK(r1.mistake == 1);  // its rest sits in a missed group
    CHECK(r2.gestures == 1);
    CHECK(r2.exact == 1);
    CHECK(r1.exact + r1.ba + r1.mistake == r1.gestures);
    CHECK(r2.exact + r2.ba + r2.mistake == r2.gestures);
  }
  SUBCASE("raters below the meal threshold are excluded") {
    const RaterTable t = rater_table({r}, 8);
    CHECK(t.rows.empty());
  }
}

TEST_CASE("duration stats of a single bite") {
  Corpus corpus;
  corpus.meals["m"] = {Timeline{"m", "r1", {{GestureKind::Bite, 0, 2000}}}};
  const DurationStats s = duration_stats(corpus, TimingConfig{});
  const KindDurationStats& bite = s.of(GestureKind::Bite);
  CHECK(bite.count == 1);
  CHECK(bite.mean_ms == doctest::Approx(2000.0));
  CHECK(bite.stddev_ms == doctest::Approx(0.0));
  CHECK(bite.min_ms == 2000);
  CHECK(bite.max_ms == 2000);
  CHECK(s.of(GestureKind::Drink).count == 0);
}

TEST_CASE("duration stats include derived other and match a brute recount") {
  const TimingConfig cfg;
  const SimulatedCorpus sim =
      simulate_corpus(MealModel::defaults(), NoiseProfile{}, 25, cfg, 77);
  const Corpus corpus = sim.corpus();
  const DurationStats s = duration_stats(corpus, cfg);

  // independent single-pass recount in test code
  std::array<std::vector<double>, kNumKinds> pools;
  for (const auto& [meal, timelines] : corpus.meals) {
    for (const Timeline& t : timelines) {
      TimeMs cursor = 0;
      for (const Segment& seg : t.segments) {
        pools[static_cast<std::size_t>(seg.kind)].push_back(
            static_cast<double>(seg.duration()));
        if (seg.start - cursor >= cfg.gap_other_ms) {
          pools[static_cast<std::size_t>(GestureKind::Other)].push_back(
              static_cast<double>(seg.start - cursor));
        }
        cursor = seg.end;
      }
    }
  }
  for (std::size_t k = 0; k < kNumKinds; ++k) {
    const auto& pool = pools[k];
    const KindDurationStats& got = s.per_kind[k];
    CHECK(got.count == static_cast<std::int64_t>(pool.size()));
    if (pool.empty()) continue;
    double mean = 0;
    for (double d : pool) mean += d;
    mean /= static_cast<double>(pool.size());
    double var = 0;
    for (double d : pool) var += (d - mean) * (d - mean);
    var /= static_cast<double>(pool.size());  // population variance
    CHECK(got.mean_ms == doctest::Approx(mean).epsilon(1e-9));
    CHECK(got.stddev_ms == doctest::Approx(std::sqrt(var)).epsilon(1e-6));
    CHECK(got.min_ms == static_cast<TimeMs>(*std::min_element(pool.begin(), pool.end())));
    CHECK(got.max_ms == static_cast<TimeMs>(*std::max_element(pool.begin(), pool.end())));
  }
  // the simulator's other segments exist in a 300 s meal with 4 s+ gaps
  CHECK(s.of(GestureKind::Other).count > 0);
}

TEST_CASE("rater table recovers the injected error rate") {
  const TimingConfig cfg;
  NoiseProfile profile;
  profile.jitter_std_ms = 0.0;
  profile.p_miss = 0.2;  // deletions only; everything else is an exact copy
  const SimulatedCorpus sim =
      simulate_corpus(MealModel::defaults(), profile, 30, cfg, 424242);

  std::vector<MatchReport> reports;
  std::int64_t deletions = 0;
  for (const SimMeal& meal : sim.meals) {
    reports.push_back(match_pair(meal.truth, meal.perturbed, meal.events, cfg));
    for (const ProvenanceTag& tag : meal.tags) {
      if (tag.perturbation == Perturbation::Delete) ++deletions;
    }
  }
  const RaterTable table = rater_table(reports, 1);
  REQUIRE(table.rows.size() == 2);
  const RaterRow& r1 = table.rows[0].rater_id == "r1" ? table.rows[0]
                                                      : table.rows[1];
  const RaterRow& r2 = table.rows[0].rater_id == "r2" ? table.rows[0]
                                                      : table.rows[1];
  // the truth rater owns every deleted gesture's missed group, exactly
  CHECK(r1.mistake == deletions);
  CHECK(r1.exact == r1.gestures - deletions);
  CHECK(r2.mistake == 0);
  CHECK(r2.exact == r2.gestures);
  // and the observed rate sits near the configured probability
  const double rate =
      static_cast<double>(r1.mistake) / static_cast<double>(r1.gestures);
  CHECK(rate > 0.15);
  CHECK(rate < 0.25);
}

TEST_CASE("reliability aggregation is permutation-invariant") {
  const TimingConfig cfg;
  const SimulatedCorpus sim = simulate_corpus(
      MealModel::defaults(),
      [] {
        NoiseProfile p;
        p.p_miss = 0.2;
        p.p_split = 0.2;
        return p;
      }(),
      10, cfg, 3);
  std::vector<MatchReport> reports;
  for (const SimMeal& meal : sim.meals) {
    reports.push_back(match_pair(meal.truth, meal.perturbed, meal.events, cfg));
  }
  const ReliabilityTable forward = reliability_table(reports);
  std::reverse(reports.begin(), reports.end());
  const ReliabilityTable backward = reliability_table(reports);
  for (std::size_t c = 0; c < kNumCases; ++c) {
    CHECK(forward.all.cases[c] == backward.all.cases[c]);
  }
}

TEST_CASE("render formats emit the expected shapes") {
  const ReliabilityTable t = make_reliability_table(reference_counts());
  const std::string csv = render_reliability(t, OutputFormat::Csv);
  CHECK(csv.find("Agreement,all,13184,75.0") != std::string::npos);
  const std::string jsonl = render_reliability(t, OutputFormat::JsonLines);
  CHECK(jsonl.find("\"count\":13184") != std::string::npos);
  CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 50);  // 10 rows x 5 cols
  const std::string text = render_reliability(t, OutputFormat::Text);
  CHECK(text.find("92.4%") != std::string::npos);
  CHECK(text.find("17576") != std::string::npos);
}
