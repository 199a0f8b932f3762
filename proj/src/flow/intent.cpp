#include "surveybot/flow/intent.hpp"

#include <set>
#include <stdexcept>

#include "surveybot/localization/text.hpp"

namespace surveybot::flow {

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    const std::set<std::string> sa(a.begin(), a.end());
    const std::set<std::string> sb(b.begin(), b.end());
    if (sa.empty() && sb.empty()) return 0.0;
    std::size_t common = 0;
    for (const auto& t : sa) common += sb.count(t);
    const std::size_t united = sa.size() + sb.size() - common;
    return static_cast<double>(common) / static_cast<double>(united);
}

IntentMatch match_intent(std::string_view utterance, std::span<const Intent> intents,
                         std::optional<Locale> locale, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw std::invalid_argument("intent threshold must be in [0, 1]");

    const std::vector<std::string> tokens = text::tokenize(utterance);
    IntentMatch best;
    const Intent* best_intent = nullptr;
    if (tokens.empty()) return best;

    for (const Intent& intent : intents) {
        double intent_score = 0.0;
        for (const auto& [phrase_locale, phrases] : intent.triggers) {
            if (locale && phrase_locale != *locale) continue;
            for (const auto& phrase : phrases) intent_score = std::max(intent_score, jaccard(tokens, text::tokenize(phrase)));
        }
        if (best_intent == nullptr || intent_score > best.score) {
            best.score = intent_score;
            best_intent = &intent;
        }
    }
    if (best_intent != nullptr && best.score > 0.0 && best.score >= threshold) best.intent = best_intent;
    return best;
}

}  // namespace surveybot::flow
