#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gestlex/ingest.hpp"
#include "gestlex/matcher.hpp"

namespace gestlex {

/// Occurrence weight and duration law for one gesture kind. Durations are
/// log-normal, parameterized by mean/stddev in seconds and clamped to
/// [min_s, max_s] so every draw is schema-valid.
struct KindModel {
  double weight = 0.0;
  double mean_s = 0.0;
  double std_s = 0.0;
  double min_s = 1.0;
  double max_s = 1.0;
};

struct MealModel {
  std::array<KindModel, 4> kinds{};  ///< kExplicitKinds order
  double gap_mean_s = 2.5;           ///< transition-gap law (log-normal)
  double gap_std_s = 2.0;
  double gap_max_s = 60.0;
  double meal_length_s = 300.0;

  /// Weights and duration laws shaped like the reference gesture statistics.
  static MealModel defaults();

  bool valid(const TimingConfig& cfg) const;
};

enum class Perturbation : std::uint8_t {
  JitterSub,         ///< boundary jitter within the sub-tolerance band
  JitterSupra,       ///< one boundary pushed beyond the supra-tolerance band
  Split,             ///< one gesture cut into 2-3 sub-gestures
  Merge,             ///< two consecutive same-kind gestures fused
  Delete,            ///< gesture dropped entirely
  Relabel,           ///< kind swapped for another
  StraddleExtend,    ///< boundary extended over a deleted different-kind neighbor
  ConsumedNeighbor,  ///< removed to serve a neighbor's straddle/merge
  NoOp,              ///< no safe draw found; exact copy emitted
};

std::string_view to_string(Perturbation p);
std::optional<Perturbation> parse_perturbation(std::string_view s);

/// Rater-error parameters. Structural probabilities must sum to at most 1;
/// the remainder is boundary jitter, split between the sub- and
/// supra-tolerance regimes by p_supra_jitter. Jitter never lands in the band
/// between the regimes (0.4-1.6 x tolerance), so every tagged expectation is
/// forced rather than borderline.
struct NoiseProfile {
  double jitter_std_ms = 200.0;
  double p_split = 0.0;
  double p_merge = 0.0;
  double p_miss = 0.0;
  double p_relabel = 0.0;
  double p_straddle = 0.0;
  double p_supra_jitter = 0.0;

  bool valid() const;

  static TimeMs sub_band_max(const TimingConfig& cfg) {
    return cfg.tolerance_ms * 4 / 10;
  }
  static TimeMs supra_band_min(const TimingConfig& cfg) {
    return cfg.tolerance_ms * 16 / 10;
  }
};

/// What was done to one ground-truth segment and, when the perturbation is
/// boundary-band safe, the match case it must produce.
struct ProvenanceTag {
  int segment_ordinal = -1;
  Perturbation perturbation{};
  std::optional<MatchCase> expected;
};

struct GeneratedMeal {
  Timeline truth;
  std::vector<IndexEvent> events;  ///< exactly one per intake gesture
};

/// Deterministic per (model, seed). Every intake gesture receives one
/// dominant-hand index event placed uniformly inside its span.
GeneratedMeal generate_meal(const MealModel& model, const std::string& meal_id,
                            std::uint64_t seed);

struct PerturbResult {
  Timeline perturbed;
  std::vector<ProvenanceTag> tags;
};

/// Apply at most one structural perturbation per ground-truth segment.
/// Draws that would break timeline validity or the tagged case's geometry
/// are re-drawn (up to 100 attempts), then degrade to an exact copy tagged
/// NoOp. The result always passes ingest validation.
PerturbResult perturb(const Timeline& truth,
                      const std::vector<IndexEvent>& events,
                      const NoiseProfile& profile, const TimingConfig& cfg,
                      std::uint64_t seed);

struct SimMeal {
  Timeline truth;      ///< rater r1
  Timeline perturbed;  ///< rater r2
  std::vector<IndexEvent> events;
  std::vector<ProvenanceTag> tags;
};

struct SimulatedCorpus {
  std::vector<SimMeal> meals;

  Corpus corpus() const;
};

/// Per-meal seed = corpus_seed xor meal ordinal, so meals can be generated
/// independently and in parallel with identical results.
SimulatedCorpus simulate_corpus(const MealModel& model,
                                const NoiseProfile& profile, int n_meals,
                                const TimingConfig& cfg,
                                std::uint64_t corpus_seed);

std::string serialize_provenance(const std::vector<ProvenanceTag>& tags,
                                 const Timeline& truth);

/// Corpus layout plus one provenance.csv per meal.
void write_simulated_corpus(const std::filesystem::path& root,
                            const SimulatedCorpus& sim);

/// `key = value` config for the simulate subcommand. Unknown keys and
/// malformed values throw std::runtime_error.
struct SimConfig {
  MealModel model = MealModel::defaults();
  NoiseProfile profile;
  int n_meals = 100;
};

SimConfig parse_sim_config(std::string_view text);
std::string default_sim_config_text();

}  // namespace gestlex
