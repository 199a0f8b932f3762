#pragma once

#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "surveybot/flow/types.hpp"

namespace surveybot::flow {

/// Catalog keys the engine emits on its own, independent of the phase list.
inline constexpr std::string_view kEngineKeys[] = {
    "greeting",
    "language.name",
    "language.prompt",
    "language.reprompt",
    "language.confirmed",
    "question.scale_hint",
    "reprompt.scale",
    "fallback.repeat",
    "survey.complete",
    "farewell",
    "feedback.tipi.intro",
    "feedback.competency.intro",
    "feedback.competency.above",
    "feedback.competency.near",
    "feedback.competency.below",
};

/// Intents the flow relies on.
inline constexpr std::string_view kLanguageIntents[] = {"language.pl", "language.uk", "language.en"};
inline constexpr std::string_view kIntentYes = "answer.yes";
inline constexpr std::string_view kIntentNo = "answer.no";

/// The dialogue state machine. A pure function of (session, inbound text):
/// it never touches storage, clocks or the network.
class FlowEngine {
public:
    explicit FlowEngine(std::shared_ptr<const FlowDefinition> flow);

    const FlowDefinition& flow() const { return *flow_; }

    /// A fresh session waiting for the respondent's first message.
    Session new_session(std::string session_id, std::string external_user_id) const;

    /// Throws std::invalid_argument if `inbound_text` is blank.
    StepResult advance(Session session, std::string_view inbound_text) const;

private:
    std::shared_ptr<const FlowDefinition> flow_;
    std::vector<Intent> language_intents_;
    std::vector<Intent> yes_no_intents_;
};

/// True if no batch mixes statements after a question and every batch holds
/// at most one question, placed last.
bool is_well_formed_batch(std::span<const OutboundMessage> batch);

}  // namespace surveybot::flow
