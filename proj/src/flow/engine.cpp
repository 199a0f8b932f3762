#include "surveybot/flow/engine.hpp"

#include <algorithm>
#include <stdexcept>

#include "surveybot/flow/intent.hpp"
#include "surveybot/flow/validate.hpp"
#include "surveybot/localization/text.hpp"

namespace surveybot::flow {

namespace {

std::vector<Intent> select_intents(const FlowDefinition& flow, std::span<const std::string_view> names) {
    std::vector<Intent> out;
    for (const auto name : names)
        if (const Intent* intent = flow.find_intent(name)) out.push_back(*intent);
    return out;
}

bool gate_passes(const QuestionSpec& q, const Session& s) {
    if (!q.gating) return true;
    return *q.gating == kGateEmployedYes && s.employed == Employment::yes;
}

std::optional<std::size_t> next_question(const Phase& p, std::size_t from, const Session& s) {
    for (std::size_t i = from; i < p.questions.size(); ++i)
        if (gate_passes(p.questions[i], s)) return i;
    return std::nullopt;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += sep;
        out += p;
    }
    return out;
}

/// Accumulates one outbound batch and the effects of a single step.
class Step {
public:
    Step(const FlowDefinition& flow, std::span<const Intent> language_intents, std::span<const Intent> yes_no_intents,
         StepResult& out)
        : flow_(flow),
          catalogs_(*flow.catalogs),
          language_intents_(language_intents),
          yes_no_intents_(yes_no_intents),
          out_(out),
          s_(out.session) {}

    void run(std::string_view text);

private:
    Locale locale() const { return s_.locale.value_or(Locale::en); }

    void push(std::string text, MessageKind kind, std::vector<std::string> keys, std::vector<QuickReply> replies = {}) {
        OutboundMessage m;
        m.recipient_id = s_.external_user_id;
        m.seq = ++s_.outbound_seq;
        m.text = std::move(text);
        m.kind = kind;
        m.keys = std::move(keys);
        m.quick_replies = std::move(replies);
        out_.messages.push_back(std::move(m));
    }

    void statement_text(const std::string& text, const std::vector<std::string>& keys) {
        for (auto& chunk : text::split_into_chunks(text, flow_.settings.chunk_limit))
            push(std::move(chunk), MessageKind::statement, keys);
    }

    void statement(const std::string& key, const Params& params = {}) {
        statement_text(catalogs_.render(key, locale(), params), {key});
    }

    std::vector<QuickReply> scale_replies(const QuestionSpec& q) const {
        std::vector<QuickReply> replies;
        if (q.option_count() > flow_.settings.max_quick_replies) return replies;
        for (int v = q.scale_min; v <= q.scale_max; ++v) replies.push_back({std::to_string(v), v});
        return replies;
    }

    Params range_params(const QuestionSpec& q) const {
        return {{"min", std::to_string(q.scale_min)},
                {"max", std::to_string(q.scale_max)},
                {"count", std::to_string(q.option_count())}};
    }

    void ask(const Phase& p, const QuestionSpec& q) {
        std::string text = catalogs_.resolve(q.text_key, locale());
        text += "\n";
        text += catalogs_.render(p.hint_key, locale(), range_params(q));
        push(std::move(text), MessageKind::question, {q.text_key, p.hint_key}, scale_replies(q));
    }

    void reprompt(const std::string& key, const QuestionSpec& q) {
        push(catalogs_.render(key, locale(), range_params(q)), MessageKind::question, {key}, scale_replies(q));
    }

    void ask_language(const std::string& key) {
        std::vector<QuickReply> replies;
        int payload = 1;
        for (const Locale l : kAllLocales) replies.push_back({catalogs_.resolve("language.name", l), payload++});
        push(catalogs_.resolve(key, locale()), MessageKind::question, {key}, std::move(replies));
    }

    void enter(std::size_t index);
    void handle_language(std::string_view text);
    void handle_answer(const Phase& p, std::string_view text);
    void competency_feedback();
    void tipi_feedback();
    std::vector<int> answers_for(Instrument instrument) const;

    const FlowDefinition& flow_;
    const CatalogSet& catalogs_;
    std::span<const Intent> language_intents_;
    std::span<const Intent> yes_no_intents_;
    StepResult& out_;
    Session& s_;
};

void Step::run(std::string_view text) {
    if (s_.finalized) {
        statement("survey.complete");
        return;
    }
    const Phase& p = flow_.phases.at(s_.cursor.phase);
    switch (p.kind) {
        case PhaseKind::greeting:
            statement("greeting" + std::string(CatalogSet::kTrilingualSuffix));
            enter(s_.cursor.phase + 1);
            return;
        case PhaseKind::language_select:
            handle_language(text);
            return;
        case PhaseKind::tipi:
        case PhaseKind::employment_gate:
        case PhaseKind::competency:
        case PhaseKind::meta:
        case PhaseKind::sus:
            handle_answer(p, text);
            return;
        default:
            throw std::logic_error("session parked on a phase that takes no input: " + std::string(to_string(p.kind)));
    }
}

void Step::enter(std::size_t index) {
    for (; index < flow_.phases.size(); ++index) {
        s_.cursor = Cursor{index, 0};
        const Phase& p = flow_.phases[index];
        switch (p.kind) {
            case PhaseKind::greeting:
                continue;
            case PhaseKind::language_select:
                ask_language("language.prompt" + std::string(CatalogSet::kTrilingualSuffix));
                return;
            case PhaseKind::tipi:
            case PhaseKind::employment_gate:
            case PhaseKind::competency:
            case PhaseKind::meta:
            case PhaseKind::sus: {
                const auto first = next_question(p, 0, s_);
                if (!first) continue;  // every question gated out
                if (!p.intro_key.empty()) statement(p.intro_key);
                s_.cursor.question = *first;
                ask(p, p.questions[*first]);
                return;
            }
            case PhaseKind::competency_feedback:
                competency_feedback();
                continue;
            case PhaseKind::tipi_feedback:
                tipi_feedback();
                continue;
            case PhaseKind::farewell:
                statement("farewell");
                s_.finalized = true;
                out_.effects.emplace_back(SessionFinalized{});
                return;
        }
    }
    throw std::logic_error("flow ended without a farewell phase");
}

void Step::handle_language(std::string_view text) {
    const std::string_view trimmed = text::trim(text);
    std::optional<Locale> chosen;
    if (trimmed == "1") chosen = Locale::pl;
    else if (trimmed == "2") chosen = Locale::uk;
    else if (trimmed == "3") chosen = Locale::en;
    else {
        const IntentMatch m = match_intent(trimmed, language_intents_, std::nullopt, flow_.settings.intent_threshold);
        if (!m.is_fallback()) chosen = parse_locale(std::string_view(m.intent->name).substr(sizeof("language.") - 1));
    }
    if (!chosen) {
        ++s_.consecutive_failures;
        ask_language("language.reprompt" + std::string(CatalogSet::kTrilingualSuffix));
        return;
    }
    s_.consecutive_failures = 0;
    s_.locale = *chosen;
    out_.effects.emplace_back(LocaleSelected{*chosen});
    statement("language.confirmed");
    enter(s_.cursor.phase + 1);
}

void Step::handle_answer(const Phase& p, std::string_view text) {
    const QuestionSpec& q = p.questions.at(s_.cursor.question);
    std::optional<int> value;
    std::string failure_key = "reprompt.scale";

    const AnswerResult r = validate_answer(q, text);
    if (const int* v = std::get_if<int>(&r)) {
        value = *v;
    } else if (p.kind == PhaseKind::employment_gate &&
               std::get<ValidationError>(r).code == ValidationErrorCode::non_numeric) {
        const IntentMatch m = match_intent(text, yes_no_intents_, s_.locale, flow_.settings.intent_threshold);
        if (m.is_fallback()) failure_key = "fallback.repeat";
        else value = m.intent->name == kIntentYes ? 1 : 2;
    }

    if (!value) {
        ++s_.consecutive_failures;
        if (s_.consecutive_failures % flow_.settings.failures_before_full_repeat == 0) {
            statement(failure_key, range_params(q));
            ask(p, q);
        } else {
            reprompt(failure_key, q);
        }
        return;
    }

    if (s_.answers.contains(q.id)) throw std::logic_error("answer for " + q.id + " already recorded");
    s_.consecutive_failures = 0;
    s_.answers.emplace(q.id, *value);
    out_.effects.emplace_back(AnswerRecorded{q.id, q.instrument, *value});
    if (p.kind == PhaseKind::employment_gate) s_.employed = *value == 1 ? Employment::yes : Employment::no;

    if (const auto next = next_question(p, s_.cursor.question + 1, s_)) {
        s_.cursor.question = *next;
        ask(p, p.questions[*next]);
        return;
    }
    if (p.kind == PhaseKind::tipi) {
        out_.effects.emplace_back(TipiScored{scoring::score_tipi(answers_for(Instrument::tipi), flow_.tipi_keying)});
    }
    enter(s_.cursor.phase + 1);
}

std::vector<int> Step::answers_for(Instrument instrument) const {
    std::vector<int> values;
    for (const auto& id : flow_.question_ids(instrument)) {
        const auto it = s_.answers.find(id);
        if (it == s_.answers.end()) return {};
        values.push_back(it->second);
    }
    return values;
}

void Step::competency_feedback() {
    if (s_.employed != Employment::yes) return;
    const std::vector<int> answers = answers_for(Instrument::competency);
    if (answers.empty()) return;

    const auto report = scoring::score_competency_fit(answers, flow_.norms);
    const auto ids = flow_.question_ids(Instrument::competency);
    std::vector<std::string> above, near, below;
    for (std::size_t i = 0; i < report.entries.size(); ++i) {
        std::string label = catalogs_.resolve(flow_.find_question(ids[i])->text_key, locale());
        switch (report.entries[i].band) {
            case scoring::Band::above: above.push_back(std::move(label)); break;
            case scoring::Band::near: near.push_back(std::move(label)); break;
            case scoring::Band::below: below.push_back(std::move(label)); break;
        }
    }
    statement("feedback.competency.intro");
    if (!above.empty()) statement("feedback.competency.above", {{"list", join(above, "; ")}});
    if (!near.empty()) statement("feedback.competency.near", {{"list", join(near, "; ")}});
    if (!below.empty()) statement("feedback.competency.below", {{"list", join(below, "; ")}});
}

void Step::tipi_feedback() {
    const std::vector<int> answers = answers_for(Instrument::tipi);
    if (answers.empty()) return;
    const auto profile = scoring::score_tipi(answers, flow_.tipi_keying);
    const auto statements = scoring::make_feedback(profile, flow_.norms, locale(), catalogs_);

    statement("feedback.tipi.intro");
    for (std::size_t i = 0; i < statements.size(); ++i) {
        const scoring::Trait t = scoring::kAllTraits[i];
        const auto band = scoring::trait_band(profile[t], flow_.norms.traits[i], flow_.norms.trait_band_half_width_sd);
        statement_text(statements[i], {scoring::feedback_key(t, band)});
    }
}

}  // namespace

FlowEngine::FlowEngine(std::shared_ptr<const FlowDefinition> flow) : flow_(std::move(flow)) {
    if (!flow_ || !flow_->catalogs) throw std::invalid_argument("FlowEngine needs a loaded flow");
    static constexpr std::string_view kYesNo[] = {kIntentYes, kIntentNo};
    language_intents_ = select_intents(*flow_, kLanguageIntents);
    yes_no_intents_ = select_intents(*flow_, kYesNo);
}

Session FlowEngine::new_session(std::string session_id, std::string external_user_id) const {
    Session s;
    s.session_id = std::move(session_id);
    s.external_user_id = std::move(external_user_id);
    return s;
}

StepResult FlowEngine::advance(Session session, std::string_view inbound_text) const {
    if (text::trim(inbound_text).empty()) throw std::invalid_argument("inbound text is blank");

    StepResult out;
    out.session = std::move(session);
    Step(*flow_, language_intents_, yes_no_intents_, out).run(inbound_text);
    if (!out.messages.empty()) out.messages.back().last_in_batch = true;
    return out;
}

bool is_well_formed_batch(std::span<const OutboundMessage> batch) {
    const auto questions = std::ranges::count(batch, MessageKind::question, &OutboundMessage::kind);
    if (questions > 1) return false;
    return questions == 0 || batch.back().kind == MessageKind::question;
}

}  // namespace surveybot::flow
