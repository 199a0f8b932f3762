#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "surveybot/localization/catalog.hpp"
#include "surveybot/scoring/scoring.hpp"

namespace surveybot::flow {

enum class Instrument { tipi, competency, sus, meta };

std::string_view to_string(Instrument instrument);

enum class PhaseKind {
    greeting,
    language_select,
    tipi,
    employment_gate,
    competency,
    competency_feedback,
    tipi_feedback,
    meta,
    sus,
    farewell,
};

std::string_view to_string(PhaseKind kind);
std::optional<PhaseKind> parse_phase_kind(std::string_view name);

/// The only gating predicate the engine understands.
inline constexpr std::string_view kGateEmployedYes = "employed == yes";

struct QuestionSpec {
    std::string id;
    Instrument instrument = Instrument::meta;
    int scale_min = 1;
    int scale_max = 5;
    std::string text_key;
    std::optional<std::string> gating;

    int option_count() const { return scale_max - scale_min + 1; }
};

struct Phase {
    PhaseKind kind = PhaseKind::greeting;
    std::string intro_key;  // statement emitted on entry, empty for none
    std::string hint_key;   // appended to every question of the phase
    std::vector<QuestionSpec> questions;
};

struct Intent {
    std::string name;
    std::map<Locale, std::vector<std::string>> triggers;
};

struct FlowSettings {
    double intent_threshold = 0.45;
    std::chrono::milliseconds message_delay{800};
    std::size_t chunk_limit = 400;
    int failures_before_full_repeat = 3;
    /// Scale answers get quick-reply buttons when the range has at most this many options.
    int max_quick_replies = 13;
};

/// A validated questionnaire flow. Built by load_flow(); immutable afterwards.
struct FlowDefinition {
    std::vector<Phase> phases;
    std::vector<Intent> intents;
    FlowSettings settings;
    scoring::TipiKeying tipi_keying;
    scoring::NormTable norms;
    std::shared_ptr<const CatalogSet> catalogs;

    const Phase* find_phase(PhaseKind kind) const;
    const Intent* find_intent(std::string_view name) const;
    const QuestionSpec* find_question(std::string_view id) const;
    std::size_t count_questions(Instrument instrument) const;
    /// Question ids of one instrument in flow order.
    std::vector<std::string> question_ids(Instrument instrument) const;
};

enum class Employment { unknown, yes, no };

std::string_view to_string(Employment e);

struct Cursor {
    std::size_t phase = 0;
    std::size_t question = 0;

    auto operator<=>(const Cursor&) const = default;
};

struct Session {
    std::string session_id;
    std::string external_user_id;
    std::optional<Locale> locale;
    Cursor cursor;
    std::map<std::string, int> answers;
    Employment employed = Employment::unknown;
    std::uint64_t outbound_seq = 0;  // seq of the last message emitted
    int consecutive_failures = 0;
    bool finalized = false;
    std::int64_t created_at = 0;  // unix ms, maintained by the gateway
    std::int64_t updated_at = 0;

    bool operator==(const Session&) const = default;
};

enum class MessageKind { statement, question };

struct QuickReply {
    std::string label;
    int payload = 0;

    bool operator==(const QuickReply&) const = default;
};

struct OutboundMessage {
    std::string recipient_id;
    std::uint64_t seq = 0;
    std::string text;
    MessageKind kind = MessageKind::statement;
    std::vector<QuickReply> quick_replies;
    std::vector<std::string> keys;  // catalog keys the text was rendered from
    bool last_in_batch = false;

    bool operator==(const OutboundMessage&) const = default;
};

struct AnswerRecorded {
    std::string question_id;
    Instrument instrument = Instrument::meta;
    int value = 0;
};

struct LocaleSelected {
    Locale locale = Locale::en;
};

struct TipiScored {
    scoring::BigFiveProfile profile;
};

struct SessionFinalized {};

/// Side effects the gateway must persist after a step.
using Effect = std::variant<AnswerRecorded, LocaleSelected, TipiScored, SessionFinalized>;

struct StepResult {
    Session session;
    std::vector<OutboundMessage> messages;
    std::vector<Effect> effects;
};

}  // namespace surveybot::flow
