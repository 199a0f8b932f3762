#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "surveybot/flow/types.hpp"

namespace surveybot::flow {

/// |A ∩ B| / |A ∪ B| over token sets; 0 when both are empty.
double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

struct IntentMatch {
    const Intent* intent = nullptr;  // nullptr means FALLBACK
    double score = 0.0;              // best score seen, even on fallback

    bool is_fallback() const { return intent == nullptr; }
};

/// Scores every intent by the best Jaccard similarity between the normalized
/// utterance and any of its trigger phrases. Only phrases for `locale` are
/// considered, or all phrases when no locale is chosen yet. Ties go to the
/// earlier intent. Throws std::invalid_argument for a threshold outside [0, 1].
IntentMatch match_intent(std::string_view utterance, std::span<const Intent> intents,
                         std::optional<Locale> locale, double threshold);

}  // namespace surveybot::flow
