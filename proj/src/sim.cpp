#include "gestlex/sim.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

namespace gestlex {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Log-normal by moments; zero spread collapses to the mean.
struct LogNormal {
  double mean = 0.0;
  double mu = 0.0;
  double sigma = 0.0;

  LogNormal(double mean_, double std_) : mean(mean_) {
    if (mean_ > 0.0 && std_ > 0.0) {
      const double cv2 = (std_ / mean_) * (std_ / mean_);
      sigma = std::sqrt(std::log1p(cv2));
      mu = std::log(mean_) - 0.5 * sigma * sigma;
    }
  }

  double sample(std::mt19937_64& rng) const {
    if (mean <= 0.0) return 0.0;
    if (sigma <= 0.0) return mean;
    std::normal_distribution<double> normal(mu, sigma);
    return std::exp(normal(rng));
  }
};

TimeMs clamp_ms(double seconds, double min_s, double max_s) {
  return std::llround(std::clamp(seconds, min_s, max_s) * 1000.0);
}

bool ranges_overlap(TimeMs lo1, TimeMs hi1, TimeMs lo2, TimeMs hi2) {
  return std::max(lo1, lo2) < std::min(hi1, hi2);
}

int kind_slot(GestureKind k) {
  for (std::size_t i = 0; i < kExplicitKinds.size(); ++i) {
    if (kExplicitKinds[i] == k) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

std::string_view to_string(Perturbation p) {
  switch (p) {
    case Perturbation::JitterSub: return "jitter_sub";
    case Perturbation::JitterSupra: return "jitter_supra";
    case Perturbation::Split: return "split";
    case Perturbation::Merge: return "merge";
    case Perturbation::Delete: return "delete";
    case Perturbation::Relabel: return "relabel";
    case Perturbation::StraddleExtend: return "straddle_extend";
    case Perturbation::ConsumedNeighbor: return "consumed_neighbor";
    case Perturbation::NoOp: return "noop";
  }
  return "?";
}

std::optional<Perturbation> parse_perturbation(std::string_view s) {
  for (int p = 0; p <= static_cast<int>(Perturbation::NoOp); ++p) {
    if (s == to_string(static_cast<Perturbation>(p))) {
      return static_cast<Perturbation>(p);
    }
  }
  return std::nullopt;
}

MealModel MealModel::defaults() {
  MealModel m;
  m.kinds[0] = {18462.0, 2.0, 1.0, 1.0, 11.0};    // bite
  m.kinds[1] = {2182.0, 6.0, 2.0, 1.0, 18.0};     // drink
  m.kinds[2] = {14861.0, 5.0, 5.0, 1.0, 186.0};   // utensiling
  m.kinds[3] = {14761.0, 8.0, 12.0, 1.0, 341.0};  // rest
  return m;
}

bool MealModel::valid(const TimingConfig& cfg) const {
  double total_weight = 0.0;
  for (const KindModel& k : kinds) {
    if (k.weight < 0.0) return false;
    total_weight += k.weight;
    if (k.weight == 0.0) continue;
    if (k.mean_s <= 0.0 || k.std_s < 0.0) return false;
    if (k.min_s > k.max_s) return false;
    if (std::llround(k.min_s * 1000.0) < cfg.min_gesture_ms) return false;
  }
  return total_weight > 0.0 && gap_mean_s >= 0.0 && gap_std_s >= 0.0 &&
         gap_max_s >= 0.0 && meal_length_s > 0.0;
}

bool NoiseProfile::valid() const {
  const double probs[] = {p_split, p_merge, p_miss, p_relabel, p_straddle,
                          p_supra_jitter};
  for (double p : probs) {
    if (p < 0.0 || p > 1.0) return false;
  }
  return jitter_std_ms >= 0.0 &&
         p_split + p_merge + p_miss + p_relabel + p_straddle <= 1.0;
}

GeneratedMeal generate_meal(const MealModel& model, const std::string& meal_id,
                            std::uint64_t seed) {
  GeneratedMeal out;
  out.truth.meal_id = meal_id;
  out.truth.rater_id = "r1";
  std::mt19937_64 rng(seed);

  std::array<double, 4> weights{};
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i] = model.kinds[i].weight;
  }
  std::discrete_distribution<int> kind_dist(weights.begin(), weights.end());
  const LogNormal gap_law(model.gap_mean_s, model.gap_std_s);
  std::array<LogNormal, 4> duration_laws = {
      LogNormal(model.kinds[0].mean_s, model.kinds[0].std_s),
      LogNormal(model.kinds[1].mean_s, model.kinds[1].std_s),
      LogNormal(model.kinds[2].mean_s, model.kinds[2].std_s),
      LogNormal(model.kinds[3].mean_s, model.kinds[3].std_s),
  };

  const TimeMs length_ms = std::llround(model.meal_length_s * 1000.0);
  auto draw_gap = [&] {
    return clamp_ms(gap_law.sample(rng), 0.0, model.gap_max_s);
  };

  TimeMs t = draw_gap();
  while (t < length_ms) {
    const int ki = kind_dist(rng);
    const KindModel& km = model.kinds[ki];
    const TimeMs dur = clamp_ms(duration_laws[ki].sample(rng), km.min_s, km.max_s);
    const Segment seg{kExplicitKinds[ki], t, t + dur};
    out.truth.segments.push_back(seg);
    if (is_intake(seg.kind)) {
      std::uniform_int_distribution<TimeMs> where(seg.start, seg.end);
      out.events.push_back({meal_id, where(rng), seg.kind, Hand::Dominant});
    }
    t = seg.end + draw_gap();
  }
  return out;
}

PerturbResult perturb(const Timeline& truth,
                      const std::vector<IndexEvent>& events,
                      const NoiseProfile& profile, const TimingConfig& cfg,
                      std::uint64_t seed) {
  // Expected cases are structural; they hold for any event placement the
  // generator produces, so the events only tag along for interface parity.
  (void)events;

  PerturbResult result;
  result.perturbed.meal_id = truth.meal_id;
  result.perturbed.rater_id = "r2";
  std::mt19937_64 rng(seed);

  const std::vector<Segment>& orig = truth.segments;
  const int n = static_cast<int>(orig.size());
  std::vector<char> consumed(n, 0);
  std::vector<Segment>& out = result.perturbed.segments;
  std::vector<std::pair<TimeMs, TimeMs>> reserved;

  const TimeMs sub_max = NoiseProfile::sub_band_max(cfg);
  const TimeMs supra_min = NoiseProfile::supra_band_min(cfg);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto coin = [&] { return std::uniform_int_distribution<int>(0, 1)(rng) == 1; };
  auto gauss_mag = [&](double std_ms) -> TimeMs {
    if (std_ms <= 0.0) return 0;
    std::normal_distribution<double> g(0.0, std_ms);
    return std::llround(std::abs(g(rng)));
  };

  // A candidate footprint is usable when it touches no original segment
  // (other than the one being perturbed), no segment already emitted, and
  // no reservation left by earlier perturbations. Reservations are what
  // keep tagged cases from bleeding into each other.
  auto clean = [&](TimeMs lo, TimeMs hi, int exclude) {
    for (int k = 0; k < n; ++k) {
      if (k == exclude) continue;
      if (ranges_overlap(lo, hi, orig[k].start, orig[k].end)) return false;
    }
    for (const Segment& s : out) {
      if (ranges_overlap(lo, hi, s.start, s.end)) return false;
    }
    for (const auto& [rlo, rhi] : reserved) {
      if (ranges_overlap(lo, hi, rlo, rhi)) return false;
    }
    return true;
  };
  auto region_free = [&](TimeMs lo, TimeMs hi) {
    for (const Segment& s : out) {
      if (ranges_overlap(lo, hi, s.start, s.end)) return false;
    }
    for (const auto& [rlo, rhi] : reserved) {
      if (ranges_overlap(lo, hi, rlo, rhi)) return false;
    }
    return true;
  };

  enum class Action { Jitter, Split, Merge, Delete, Relabel, Straddle };

  for (int i = 0; i < n; ++i) {
    if (consumed[i]) continue;
    const Segment& x = orig[i];

    const double u = unit(rng);
    Action action = Action::Jitter;
    double acc = 0.0;
    if (u < (acc += profile.p_split)) action = Action::Split;
    else if (u < (acc += profile.p_merge)) action = Action::Merge;
    else if (u < (acc += profile.p_miss)) action = Action::Delete;
    else if (u < (acc += profile.p_relabel)) action = Action::Relabel;
    else if (u < (acc += profile.p_straddle)) action = Action::Straddle;
    bool supra = false;
    if (action == Action::Jitter) supra = unit(rng) < profile.p_supra_jitter;

    // Structurally infeasible draws degrade to sub-tolerance jitter; the tag
    // always states what actually happened.
    if (action == Action::Split && x.duration() < 2 * cfg.min_gesture_ms) {
      action = Action::Jitter;
    }
    if (action == Action::Merge &&
        !(i + 1 < n && !consumed[i + 1] && orig[i + 1].kind == x.kind)) {
      action = Action::Jitter;
    }
    if (action == Action::Straddle &&
        !(i + 1 < n && !consumed[i + 1] && orig[i + 1].kind != x.kind)) {
      action = Action::Jitter;
    }

    bool done = false;
    switch (action) {
      case Action::Split: {
        const TimeMs min = cfg.min_gesture_ms;
        const TimeMs dur = x.duration();
        const int k = dur >= 3 * min && coin() ? 3 : 2;
        const TimeMs gap_cap =
            std::min<TimeMs>(500, (dur - k * min) / (k - 1));
        std::vector<TimeMs> gaps(k - 1);
        TimeMs gap_sum = 0;
        for (TimeMs& g : gaps) {
          g = std::uniform_int_distribution<TimeMs>(0, gap_cap)(rng);
          gap_sum += g;
        }
        const TimeMs extra = dur - gap_sum - k * min;
        std::vector<TimeMs> cuts(k - 1);
        for (TimeMs& c : cuts) {
          c = std::uniform_int_distribution<TimeMs>(0, extra)(rng);
        }
        std::sort(cuts.begin(), cuts.end());
        std::vector<TimeMs> lengths;
        TimeMs prev = 0;
        for (TimeMs c : cuts) {
          lengths.push_back(min + (c - prev));
          prev = c;
        }
        lengths.push_back(min + (extra - prev));
        TimeMs pos = x.start;
        for (int j = 0; j < k; ++j) {
          out.push_back({x.kind, pos, pos + lengths[j]});
          pos += lengths[j];
          if (j < k - 1) pos += gaps[j];
        }
        assert(pos == x.end);
        reserved.emplace_back(x.start, x.end);
        result.tags.push_back({i, Perturbation::Split,
                               MatchCase::BoundaryAmbiguityII});
        done = true;
        break;
      }
      case Action::Merge: {
        const Segment& nxt = orig[i + 1];
        out.push_back({x.kind, x.start, nxt.end});
        reserved.emplace_back(x.start, nxt.end);
        consumed[i + 1] = 1;
        result.tags.push_back({i, Perturbation::Merge,
                               MatchCase::BoundaryAmbiguityII});
        result.tags.push_back({i + 1, Perturbation::Merge,
                               MatchCase::BoundaryAmbiguityII});
        done = true;
        break;
      }
      case Action::Delete: {
        reserved.emplace_back(x.start, x.end);
        result.tags.push_back({i, Perturbation::Delete,
                               MatchCase::MistakeMissed});
        done = true;
        break;
      }
      case Action::Relabel: {
        const int own = kind_slot(x.kind);
        int pick = std::uniform_int_distribution<int>(0, 2)(rng);
        if (pick >= own) ++pick;
        out.push_back({kExplicitKinds[pick], x.start, x.end});
        reserved.emplace_back(x.start, x.end);
        result.tags.push_back({i, Perturbation::Relabel,
                               MatchCase::MistakeIdentity});
        done = true;
        break;
      }
      case Action::Straddle: {
        // Delete the different-kind neighbor's copy and extend this
        // segment's end beyond the supra band into the neighbor's span: the
        // 1:1 pair then straddles an unmatched gesture.
        const Segment& nbr = orig[i + 1];
        const TimeMs upper = i + 2 < n ? orig[i + 2].start : nbr.end;
        const TimeMs lower = std::max(nbr.start + 1, x.end + supra_min);
        if (lower <= upper) {
          for (int attempt = 0; attempt < 100 && !done; ++attempt) {
            const TimeMs y_end =
                std::uniform_int_distribution<TimeMs>(lower, upper)(rng);
            if (!region_free(x.end, y_end)) continue;
            out.push_back({x.kind, x.start, y_end});
            reserved.emplace_back(x.start, std::max(y_end, nbr.end));
            consumed[i + 1] = 1;
            result.tags.push_back({i, Perturbation::StraddleExtend,
                                   MatchCase::BoundaryAmbiguityIII});
            result.tags.push_back(
                {i + 1, Perturbation::ConsumedNeighbor, std::nullopt});
            done = true;
          }
        }
        break;
      }
      case Action::Jitter:
        break;
    }

    if (!done) {
      for (int attempt = 0; attempt < 100 && !done; ++attempt) {
        TimeMs ds = 0;
        TimeMs de = 0;
        if (supra) {
          const TimeMs mag = supra_min + gauss_mag(profile.jitter_std_ms);
          const TimeMs other =
              std::min(gauss_mag(profile.jitter_std_ms), sub_max);
          const bool jitter_start = coin();
          ds = jitter_start ? (coin() ? mag : -mag) : (coin() ? other : -other);
          de = jitter_start ? (coin() ? other : -other) : (coin() ? mag : -mag);
        } else {
          const TimeMs m1 = std::min(gauss_mag(profile.jitter_std_ms), sub_max);
          const TimeMs m2 = std::min(gauss_mag(profile.jitter_std_ms), sub_max);
          ds = coin() ? m1 : -m1;
          de = coin() ? m2 : -m2;
        }
        const Segment y{x.kind, x.start + ds, x.end + de};
        if (y.start < 0 || y.duration() < cfg.min_gesture_ms) continue;
        if (std::max(x.start, y.start) >= std::min(x.end, y.end)) continue;
        const TimeMs lo = std::min(x.start, y.start);
        const TimeMs hi = std::max(x.end, y.end);
        if (!clean(lo, hi, i)) continue;
        out.push_back(y);
        reserved.emplace_back(lo, hi);
        result.tags.push_back(
            {i, supra ? Perturbation::JitterSupra : Perturbation::JitterSub,
             supra ? MatchCase::BoundaryAmbiguityI : MatchCase::Agreement});
        done = true;
      }
      if (!done) {
        // An exact copy is always safe and always agrees.
        out.push_back(x);
        reserved.emplace_back(x.start, x.end);
        result.tags.push_back({i, Perturbation::NoOp, MatchCase::Agreement});
      }
    }
  }
  return result;
}

Corpus SimulatedCorpus::corpus() const {
  Corpus c;
  for (const SimMeal& meal : meals) {
    c.meals[meal.truth.meal_id] = {meal.truth, meal.perturbed};
    c.index_events[meal.truth.meal_id] = meal.events;
  }
  return c;
}

SimulatedCorpus simulate_corpus(const MealModel& model,
                                const NoiseProfile& profile, int n_meals,
                                const TimingConfig& cfg,
                                std::uint64_t corpus_seed) {
  if (!model.valid(cfg)) {
    throw std::invalid_argument("simulate_corpus: invalid meal model");
  }
  if (!profile.valid()) {
    throw std::invalid_argument("simulate_corpus: invalid noise profile");
  }
  SimulatedCorpus sim;
  for (int ordinal = 0; ordinal < n_meals; ++ordinal) {
    char name[32];
    std::snprintf(name, sizeof(name), "meal_%05d", ordinal);
    const std::uint64_t meal_seed =
        corpus_seed ^ static_cast<std::uint64_t>(ordinal);
    GeneratedMeal gen = generate_meal(model, name, meal_seed);
    PerturbResult pert =
        perturb(gen.truth, gen.events, profile, cfg, splitmix64(meal_seed));
    sim.meals.push_back({std::move(gen.truth), std::move(pert.perturbed),
                         std::move(gen.events), std::move(pert.tags)});
  }
  return sim;
}

std::string serialize_provenance(const std::vector<ProvenanceTag>& tags,
                                 const Timeline& truth) {
  std::string out =
      "segment_ordinal,perturbation,expected_case,kind,start_ms,end_ms\n";
  for (const ProvenanceTag& tag : tags) {
    const Segment& s = truth.segments.at(tag.segment_ordinal);
    out += std::to_string(tag.segment_ordinal) + "," +
           std::string(to_string(tag.perturbation)) + "," +
           (tag.expected ? std::string(to_string(*tag.expected)) : "") + "," +
           std::string(to_string(s.kind)) + "," + std::to_string(s.start) +
           "," + std::to_string(s.end) + "\n";
  }
  return out;
}

void write_simulated_corpus(const std::filesystem::path& root,
                            const SimulatedCorpus& sim) {
  write_corpus(root, sim.corpus());
  for (const SimMeal& meal : sim.meals) {
    std::ofstream out(root / meal.truth.meal_id / "provenance.csv",
                      std::ios::binary | std::ios::trunc);
    out << serialize_provenance(meal.tags, meal.truth);
  }
}

namespace {

std::string_view trim_cfg(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

SimConfig parse_sim_config(std::string_view text) {
  SimConfig config;
  std::map<std::string, double*, std::less<>> slots;
  const char* kind_names[] = {"bite", "drink", "utensiling", "rest"};
  for (int i = 0; i < 4; ++i) {
    KindModel& k = config.model.kinds[i];
    const std::string base = kind_names[i];
    slots[base + ".weight"] = &k.weight;
    slots[base + ".mean_s"] = &k.mean_s;
    slots[base + ".std_s"] = &k.std_s;
    slots[base + ".min_s"] = &k.min_s;
    slots[base + ".max_s"] = &k.max_s;
  }
  slots["meal_length_s"] = &config.model.meal_length_s;
  slots["gap_mean_s"] = &config.model.gap_mean_s;
  slots["gap_std_s"] = &config.model.gap_std_s;
  slots["gap_max_s"] = &config.model.gap_max_s;
  slots["noise.jitter_std_ms"] = &config.profile.jitter_std_ms;
  slots["noise.p_split"] = &config.profile.p_split;
  slots["noise.p_merge"] = &config.profile.p_merge;
  slots["noise.p_miss"] = &config.profile.p_miss;
  slots["noise.p_relabel"] = &config.profile.p_relabel;
  slots["noise.p_straddle"] = &config.profile.p_straddle;
  slots["noise.p_supra_jitter"] = &config.profile.p_supra_jitter;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    ++line_no;
    const std::string_view line = trim_cfg(text.substr(pos, end - pos));
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": expected key = value");
    }
    const std::string key{trim_cfg(line.substr(0, eq))};
    const std::string value{trim_cfg(line.substr(eq + 1))};
    char* parse_end = nullptr;
    const double v = std::strtod(value.c_str(), &parse_end);
    if (parse_end != value.c_str() + value.size() || value.empty()) {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": bad number '" + value + "'");
    }
    if (key == "meals") {
      config.n_meals = static_cast<int>(v);
      continue;
    }
    const auto slot = slots.find(key);
    if (slot == slots.end()) {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": unknown key '" + key + "'");
    }
    *slot->second = v;
  }
  return config;
}

std::string default_sim_config_text() {
  const SimConfig config;
  std::ostringstream os;
  os << "# synthetic corpus configuration\n";
  os << "meals = " << config.n_meals << "\n";
  os << "meal_length_s = " << config.model.meal_length_s << "\n";
  os << "gap_mean_s = " << config.model.gap_mean_s << "\n";
  os << "gap_std_s = " << config.model.gap_std_s << "\n";
  os << "gap_max_s = " << config.model.gap_max_s << "\n\n";
  const char* kind_names[] = {"bite", "drink", "utensiling", "rest"};
  for (int i = 0; i < 4; ++i) {
    const KindModel& k = config.model.kinds[i];
    os << kind_names[i] << ".weight = " << k.weight << "\n";
    os << kind_names[i] << ".mean_s = " << k.mean_s << "\n";
    os << kind_names[i] << ".std_s = " << k.std_s << "\n";
    os << kind_names[i] << ".min_s = " << k.min_s << "\n";
    os << kind_names[i] << ".max_s = " << k.max_s << "\n\n";
  }
  os << "# rater-error model; structural probabilities sum to at most 1,\n";
  os << "# the remainder is boundary jitter\n";
  os << "noise.jitter_std_ms = " << config.profile.jitter_std_ms << "\n";
  os << "noise.p_split = " << config.profile.p_split << "\n";
  os << "noise.p_merge = " << config.profile.p_merge << "\n";
  os << "noise.p_miss = " << config.profile.p_miss << "\n";
  os << "noise.p_relabel = " << config.profile.p_relabel << "\n";
  os << "noise.p_straddle = " << config.profile.p_straddle << "\n";
  os << "noise.p_supra_jitter = " << config.profile.p_supra_jitter << "\n";
  return os.str();
}

}  // namespace gestlex
