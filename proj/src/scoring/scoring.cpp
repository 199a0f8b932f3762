#include "surveybot/scoring/scoring.hpp"

#include <cmath>

namespace surveybot::scoring {

namespace {

void require_count(std::span<const int> answers, std::size_t expected, std::string_view what) {
    if (answers.size() != expected) {
        throw ScoringError(ScoringErrorCode::count, std::string(what) + ": expected " + std::to_string(expected) +
                                                        " answers, got " + std::to_string(answers.size()));
    }
}

void require_range(std::span<const int> answers, int scale_max, std::string_view what) {
    for (std::size_t i = 0; i < answers.size(); ++i) {
        if (answers[i] < 1 || answers[i] > scale_max) {
            throw ScoringError(ScoringErrorCode::range, std::string(what) + ": item " + std::to_string(i + 1) +
                                                            " = " + std::to_string(answers[i]) + " outside 1.." +
                                                            std::to_string(scale_max));
        }
    }
}

}  // namespace

int reverse_item(int v, int scale_max) {
    if (scale_max < 1 || v < 1 || v > scale_max)
        throw ScoringError(ScoringErrorCode::range,
                           "reverse_item: " + std::to_string(v) + " outside 1.." + std::to_string(scale_max));
    return scale_max + 1 - v;
}

std::string_view to_string(Trait trait) {
    switch (trait) {
        case Trait::extraversion: return "extraversion";
        case Trait::agreeableness: return "agreeableness";
        case Trait::conscientiousness: return "conscientiousness";
        case Trait::emotional_stability: return "emotional_stability";
        case Trait::openness: return "openness";
    }
    return "?";
}

BigFiveProfile score_tipi(std::span<const int> answers, const TipiKeying& keying) {
    require_count(answers, kTipiItems, "TIPI");
    require_range(answers, kTipiScaleMax, "TIPI");

    BigFiveProfile profile;
    for (const Trait t : kAllTraits) {
        const TraitKeying& k = keying.traits[static_cast<std::size_t>(t)];
        const auto in_range = [](int item) { return item >= 1 && item <= static_cast<int>(kTipiItems); };
        if (!in_range(k.direct_item) || !in_range(k.reversed_item))
            throw ScoringError(ScoringErrorCode::range, "TIPI keying for " + std::string(to_string(t)) +
                                                            " refers to a missing item");
        const int direct = answers[static_cast<std::size_t>(k.direct_item - 1)];
        const int reversed = reverse_item(answers[static_cast<std::size_t>(k.reversed_item - 1)], kTipiScaleMax);
        // Integer sum halved: exact on the half-point grid.
        profile[t] = static_cast<double>(direct + reversed) / 2.0;
    }
    return profile;
}

std::string_view to_string(Benchmark b) {
    switch (b) {
        case Benchmark::below: return "below";
        case Benchmark::at: return "at";
        case Benchmark::above: return "above";
    }
    return "?";
}

Benchmark sus_benchmark(double value) {
    if (value > kSusBenchmark) return Benchmark::above;
    if (value < kSusBenchmark) return Benchmark::below;
    return Benchmark::at;
}

SusScore score_sus(std::span<const int> answers) {
    require_count(answers, kSusItems, "SUS");
    require_range(answers, kSusScaleMax, "SUS");

    // Items are 1-based: odd items are positively worded, even items negatively.
    int contribution = 0;
    for (std::size_t i = 0; i < answers.size(); ++i) {
        const bool odd_item = (i % 2) == 0;
        contribution += odd_item ? answers[i] - 1 : kSusScaleMax - answers[i];
    }
    return SusScore{contribution * 2.5};
}

std::string_view to_string(Band band) {
    switch (band) {
        case Band::below: return "below";
        case Band::near: return "near";
        case Band::above: return "above";
    }
    return "?";
}

void NormTable::validate() const {
    for (const Trait t : kAllTraits) {
        if (!(traits[static_cast<std::size_t>(t)].sd > 0.0))
            throw ScoringError(ScoringErrorCode::norms_mismatch,
                               "norm SD for " + std::string(to_string(t)) + " must be positive");
    }
    if (!(trait_band_half_width_sd > 0.0) || !(competency_band_half_width > 0.0))
        throw ScoringError(ScoringErrorCode::norms_mismatch, "band widths must be positive");
}

Band trait_band(double score, const TraitNorm& norm, double half_width_sd) {
    const double half_width = half_width_sd * norm.sd;
    const double delta = score - norm.mean;
    if (delta > half_width) return Band::above;
    if (delta < -half_width) return Band::below;
    return Band::near;
}

Band competency_band(double delta, double half_width) {
    if (delta > half_width) return Band::above;
    if (delta < -half_width) return Band::below;
    return Band::near;
}

CompetencyFitReport score_competency_fit(std::span<const int> answers, const NormTable& norms) {
    require_count(answers, kCompetencyItems, "competency fit");
    require_range(answers, kCompetencyScaleMax, "competency fit");
    if (norms.competency_means.size() != kCompetencyItems)
        throw ScoringError(ScoringErrorCode::norms_mismatch,
                           "norm table has " + std::to_string(norms.competency_means.size()) +
                               " competency means, expected " + std::to_string(kCompetencyItems));

    CompetencyFitReport report;
    report.entries.reserve(answers.size());
    for (std::size_t i = 0; i < answers.size(); ++i) {
        CompetencyEntry e;
        e.answer = answers[i];
        e.reference_mean = norms.competency_means[i];
        e.delta = e.answer - e.reference_mean;
        e.band = competency_band(e.delta, norms.competency_band_half_width);
        report.entries.push_back(e);
    }
    return report;
}

double round_to_tenth(double v) {
    return std::round(v * 10.0) / 10.0;
}

}  // namespace surveybot::scoring
