#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "surveybot/localization/catalog.hpp"

namespace surveybot::scoring {

enum class ScoringErrorCode { count, range, norms_mismatch, missing_translation };

class ScoringError : public std::runtime_error {
public:
    ScoringError(ScoringErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ScoringErrorCode code() const { return code_; }

private:
    ScoringErrorCode code_;
};

inline constexpr std::size_t kTipiItems = 10;
inline constexpr std::size_t kSusItems = 10;
inline constexpr std::size_t kCompetencyItems = 26;
inline constexpr int kTipiScaleMax = 7;
inline constexpr int kSusScaleMax = 5;
inline constexpr int kCompetencyScaleMax = 5;
inline constexpr double kSusBenchmark = 68.0;

/// Mirrors a reverse-keyed answer: scale_max + 1 - v. Throws on v outside [1, scale_max].
int reverse_item(int v, int scale_max);

enum class Trait { extraversion, agreeableness, conscientiousness, emotional_stability, openness };

inline constexpr std::array<Trait, 5> kAllTraits{Trait::extraversion, Trait::agreeableness,
                                                 Trait::conscientiousness, Trait::emotional_stability,
                                                 Trait::openness};

std::string_view to_string(Trait trait);

/// Which TIPI items (1-based) feed a trait. Comes from the flow config.
struct TraitKeying {
    int direct_item = 0;
    int reversed_item = 0;
};

struct TipiKeying {
    std::array<TraitKeying, 5> traits{};  // indexed by Trait
};

/// Each value is the mean of a direct and a reversed item, so it lies on
/// the half-point grid {1.0, 1.5, ..., 7.0}.
struct BigFiveProfile {
    std::array<double, 5> scores{};

    double operator[](Trait t) const { return scores[static_cast<std::size_t>(t)]; }
    double& operator[](Trait t) { return scores[static_cast<std::size_t>(t)]; }
    bool operator==(const BigFiveProfile&) const = default;
};

BigFiveProfile score_tipi(std::span<const int> answers, const TipiKeying& keying);

enum class Benchmark { below, at, above };

std::string_view to_string(Benchmark b);

/// Classifies a SUS value (individual or group mean) against the 68 benchmark.
Benchmark sus_benchmark(double value);

struct SusScore {
    double value = 0.0;
    Benchmark benchmark() const { return sus_benchmark(value); }
};

SusScore score_sus(std::span<const int> answers);

enum class Band { below, near, above };

std::string_view to_string(Band band);

struct TraitNorm {
    double mean = 0.0;
    double sd = 1.0;
};

/// Reference values for feedback banding. The shipped defaults are
/// placeholders, see config/README in the repo.
struct NormTable {
    std::array<TraitNorm, 5> traits{};  // indexed by Trait
    std::vector<double> competency_means;
    double trait_band_half_width_sd = 0.5;
    double competency_band_half_width = 0.5;

    /// Throws ScoringError(norms_mismatch) on non-positive SDs or widths.
    void validate() const;
};

Band trait_band(double score, const TraitNorm& norm, double half_width_sd);
Band competency_band(double delta, double half_width);

struct CompetencyEntry {
    int answer = 0;
    double reference_mean = 0.0;
    double delta = 0.0;
    Band band = Band::near;
};

struct CompetencyFitReport {
    std::vector<CompetencyEntry> entries;
};

CompetencyFitReport score_competency_fit(std::span<const int> answers, const NormTable& norms);

/// One statement per trait, picked by band from keys
/// `feedback.tipi.<trait>.<band>`.
std::vector<std::string> make_feedback(const BigFiveProfile& profile, const NormTable& norms, Locale locale,
                                       const CatalogSet& catalogs);

std::string feedback_key(Trait trait, Band band);

/// Rounds half away from zero to one decimal, the storage precision of trait scores.
double round_to_tenth(double v);

}  // namespace surveybot::scoring
