#include "surveybot/flow/types.hpp"

#include <algorithm>

namespace surveybot::flow {

std::string_view to_string(Instrument instrument) {
    switch (instrument) {
        case Instrument::tipi: return "TIPI";
        case Instrument::competency: return "COMPETENCY";
        case Instrument::sus: return "SUS";
        case Instrument::meta: return "META";
    }
    return "?";
}

namespace {

constexpr std::pair<PhaseKind, std::string_view> kPhaseNames[] = {
    {PhaseKind::greeting, "greeting"},
    {PhaseKind::language_select, "language_select"},
    {PhaseKind::tipi, "tipi"},
    {PhaseKind::employment_gate, "employment_gate"},
    {PhaseKind::competency, "competency"},
    {PhaseKind::competency_feedback, "competency_feedback"},
    {PhaseKind::tipi_feedback, "tipi_feedback"},
    {PhaseKind::meta, "meta"},
    {PhaseKind::sus, "sus"},
    {PhaseKind::farewell, "farewell"},
};

}  // namespace

std::string_view to_string(PhaseKind kind) {
    for (const auto& [k, name] : kPhaseNames)
        if (k == kind) return name;
    return "?";
}

std::optional<PhaseKind> parse_phase_kind(std::string_view name) {
    for (const auto& [k, n] : kPhaseNames)
        if (n == name) return k;
    return std::nullopt;
}

std::string_view to_string(Employment e) {
    switch (e) {
        case Employment::unknown: return "unknown";
        case Employment::yes: return "yes";
        case Employment::no: return "no";
    }
    return "?";
}

const Phase* FlowDefinition::find_phase(PhaseKind kind) const {
    const auto it = std::ranges::find(phases, kind, &Phase::kind);
    return it == phases.end() ? nullptr : &*it;
}

const Intent* FlowDefinition::find_intent(std::string_view name) const {
    const auto it = std::ranges::find(intents, name, &Intent::name);
    return it == intents.end() ? nullptr : &*it;
}

const QuestionSpec* FlowDefinition::find_question(std::string_view id) const {
    for (const auto& p : phases)
        for (const auto& q : p.questions)
            if (q.id == id) return &q;
    return nullptr;
}

std::size_t FlowDefinition::count_questions(Instrument instrument) const {
    std::size_t n = 0;
    for (const auto& p : phases)
        n += static_cast<std::size_t>(std::ranges::count(p.questions, instrument, &QuestionSpec::instrument));
    return n;
}

std::vector<std::string> FlowDefinition::question_ids(Instrument instrument) const {
    std::vector<std::string> ids;
    for (const auto& p : phases)
        for (const auto& q : p.questions)
            if (q.instrument == instrument) ids.push_back(q.id);
    return ids;
}

}  // namespace surveybot::flow
