#include "surveybot/scoring/scoring.hpp"

#include <cstdio>

namespace surveybot::scoring {

std::string feedback_key(Trait trait, Band band) {
    return "feedback.tipi." + std::string(to_string(trait)) + "." + std::string(to_string(band));
}

std::vector<std::string> make_feedback(const BigFiveProfile& profile, const NormTable& norms, Locale locale,
                                       const CatalogSet& catalogs) {
    std::vector<std::string> statements;
    statements.reserve(kAllTraits.size());
    for (const Trait t : kAllTraits) {
        const Band band = trait_band(profile[t], norms.traits[static_cast<std::size_t>(t)],
                                     norms.trait_band_half_width_sd);
        const std::string key = feedback_key(t, band);
        if (!catalogs.contains(key))
            throw ScoringError(ScoringErrorCode::missing_translation, "no feedback text for " + key);
        char score[16];
        std::snprintf(score, sizeof score, "%.1f", profile[t]);
        statements.push_back(catalogs.render(key, locale, {{"score", score}}));
    }
    return statements;
}

}  // namespace surveybot::scoring
