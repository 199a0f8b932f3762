#include "surveybot/flow/config.hpp"

#include <fstream>
#include <set>

#include "surveybot/flow/engine.hpp"

namespace surveybot::flow {

using nlohmann::json;

std::string_view to_string(ConfigErrorCode code) {
    switch (code) {
        case ConfigErrorCode::schema_error: return "SCHEMA_ERROR";
        case ConfigErrorCode::missing_translation: return "MISSING_TRANSLATION";
        case ConfigErrorCode::bad_count: return "BAD_COUNT";
    }
    return "?";
}

ConfigError::ConfigError(ConfigErrorCode code, std::string position, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + " at " + (position.empty() ? "/" : position) + ": " +
                         message),
      code_(code),
      position_(std::move(position)) {}

namespace {

constexpr std::size_t kExpectedTipi = 10;
constexpr std::size_t kExpectedCompetency = 26;
constexpr std::size_t kExpectedSus = 10;
// Age is asked as a META question; everything else stays within 1..7.
constexpr int kMetaScaleCeiling = 120;

constexpr PhaseKind kCanonicalOrder[] = {
    PhaseKind::greeting,       PhaseKind::language_select,     PhaseKind::tipi,
    PhaseKind::employment_gate, PhaseKind::competency,         PhaseKind::competency_feedback,
    PhaseKind::tipi_feedback,  PhaseKind::sus,                 PhaseKind::farewell,
};

[[noreturn]] void schema(const std::string& at, const std::string& msg) {
    throw ConfigError(ConfigErrorCode::schema_error, at, msg);
}

const json& require(const json& obj, const std::string& at, const char* key) {
    if (!obj.is_object()) schema(at, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) schema(at, std::string("missing field '") + key + "'");
    return *it;
}

std::string require_string(const json& obj, const std::string& at, const char* key) {
    const json& v = require(obj, at, key);
    if (!v.is_string() || v.get_ref<const std::string&>().empty())
        schema(at + "/" + key, "expected a non-empty string");
    return v.get<std::string>();
}

std::string optional_string(const json& obj, const std::string& at, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) return {};
    if (!it->is_string()) schema(at + "/" + key, "expected a string");
    return it->get<std::string>();
}

double require_number(const json& obj, const std::string& at, const char* key) {
    const json& v = require(obj, at, key);
    if (!v.is_number()) schema(at + "/" + key, "expected a number");
    return v.get<double>();
}

Instrument instrument_for(PhaseKind kind) {
    switch (kind) {
        case PhaseKind::tipi: return Instrument::tipi;
        case PhaseKind::competency: return Instrument::competency;
        case PhaseKind::sus: return Instrument::sus;
        default: return Instrument::meta;
    }
}

bool asks_questions(PhaseKind kind) {
    switch (kind) {
        case PhaseKind::tipi:
        case PhaseKind::employment_gate:
        case PhaseKind::competency:
        case PhaseKind::meta:
        case PhaseKind::sus: return true;
        default: return false;
    }
}

void check_scale(const QuestionSpec& q, PhaseKind kind, const std::string& at) {
    if (!(q.scale_min >= 1 && q.scale_min < q.scale_max)) schema(at + "/scale", "need 1 <= min < max");
    switch (q.instrument) {
        case Instrument::tipi:
            if (q.scale_min != 1 || q.scale_max != scoring::kTipiScaleMax) schema(at + "/scale", "TIPI items use 1..7");
            break;
        case Instrument::sus:
            if (q.scale_min != 1 || q.scale_max != scoring::kSusScaleMax) schema(at + "/scale", "SUS items use 1..5");
            break;
        case Instrument::competency:
            if (q.scale_min != 1 || q.scale_max != scoring::kCompetencyScaleMax)
                schema(at + "/scale", "competency items use 1..5");
            break;
        case Instrument::meta:
            if (kind == PhaseKind::employment_gate && (q.scale_min != 1 || q.scale_max != 2))
                schema(at + "/scale", "the employment gate uses 1 (yes) .. 2 (no)");
            if (q.scale_max > kMetaScaleCeiling) schema(at + "/scale", "scale too large");
            break;
    }
}

QuestionSpec parse_question(const json& jq, PhaseKind kind, const std::string& at) {
    QuestionSpec q;
    q.id = require_string(jq, at, "id");
    q.instrument = instrument_for(kind);
    const json& scale = require(jq, at, "scale");
    if (!scale.is_array() || scale.size() != 2 || !scale[0].is_number_integer() || !scale[1].is_number_integer())
        schema(at + "/scale", "expected [min, max] integers");
    q.scale_min = scale[0].get<int>();
    q.scale_max = scale[1].get<int>();
    q.text_key = jq.contains("text") ? require_string(jq, at, "text") : q.id;
    if (jq.contains("gating")) {
        const std::string gating = require_string(jq, at, "gating");
        if (gating != kGateEmployedYes) schema(at + "/gating", "unknown gating predicate '" + gating + "'");
        q.gating = gating;
    }
    check_scale(q, kind, at);
    return q;
}

void check_phase_order(const std::vector<Phase>& phases) {
    std::size_t next = 0;
    bool seen_language = false;
    for (std::size_t i = 0; i < phases.size(); ++i) {
        const std::string at = "/phases/" + std::to_string(i);
        const PhaseKind kind = phases[i].kind;
        if (kind == PhaseKind::meta) {
            if (!seen_language || next >= std::size(kCanonicalOrder))
                schema(at, "meta phases must come after language_select and before farewell");
            continue;
        }
        if (next >= std::size(kCanonicalOrder) || kCanonicalOrder[next] != kind)
            schema(at, "phase '" + std::string(to_string(kind)) + "' out of order; expected '" +
                           std::string(next < std::size(kCanonicalOrder) ? to_string(kCanonicalOrder[next])
                                                                         : std::string_view("end of flow")) +
                           "'");
        if (kind == PhaseKind::language_select) seen_language = true;
        ++next;
    }
    if (next != std::size(kCanonicalOrder))
        schema("/phases", "missing phase '" + std::string(to_string(kCanonicalOrder[next])) + "'");
}

void check_counts(const FlowDefinition& flow) {
    const auto count = [&](Instrument i, std::size_t expected, const char* what) {
        const std::size_t n = flow.count_questions(i);
        if (n != expected)
            throw ConfigError(ConfigErrorCode::bad_count, "/phases",
                              std::string(what) + ": expected " + std::to_string(expected) + " questions, found " +
                                  std::to_string(n));
    };
    count(Instrument::tipi, kExpectedTipi, "tipi");
    count(Instrument::competency, kExpectedCompetency, "competency");
    count(Instrument::sus, kExpectedSus, "sus");

    const Phase* gate = flow.find_phase(PhaseKind::employment_gate);
    if (gate->questions.size() != 1)
        throw ConfigError(ConfigErrorCode::bad_count, "/phases", "employment_gate needs exactly one question");
}

std::vector<Intent> parse_intents(const json& doc) {
    std::vector<Intent> intents;
    const json& arr = require(doc, "", "intents");
    if (!arr.is_array()) schema("/intents", "expected an array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string at = "/intents/" + std::to_string(i);
        Intent intent;
        intent.name = require_string(arr[i], at, "name");
        if (!names.insert(intent.name).second) schema(at + "/name", "duplicate intent '" + intent.name + "'");
        const json& triggers = require(arr[i], at, "triggers");
        if (!triggers.is_object()) schema(at + "/triggers", "expected an object keyed by locale");
        for (const auto& [code, phrases] : triggers.items()) {
            const auto locale = parse_locale(code);
            if (!locale) schema(at + "/triggers/" + code, "unknown locale");
            if (!phrases.is_array()) schema(at + "/triggers/" + code, "expected an array of phrases");
            for (const auto& p : phrases) {
                if (!p.is_string() || p.get_ref<const std::string&>().empty())
                    schema(at + "/triggers/" + code, "trigger phrases must be non-empty strings");
                intent.triggers[*locale].push_back(p.get<std::string>());
            }
        }
        for (const Locale l : kAllLocales) {
            if (intent.triggers[l].empty())
                throw ConfigError(ConfigErrorCode::missing_translation, at + "/triggers",
                                  "intent '" + intent.name + "' has no trigger phrase for " +
                                      std::string(to_string(l)));
        }
        intents.push_back(std::move(intent));
    }
    const auto need = [&](std::string_view name) {
        if (!names.contains(std::string(name))) schema("/intents", "missing required intent '" + std::string(name) + "'");
    };
    for (const auto name : kLanguageIntents) need(name);
    need(kIntentYes);
    need(kIntentNo);
    return intents;
}

FlowSettings parse_settings(const json& doc) {
    FlowSettings s;
    const auto it = doc.find("settings");
    if (it == doc.end()) return s;
    const json& js = *it;
    if (!js.is_object()) schema("/settings", "expected an object");
    if (js.contains("intent_threshold")) {
        s.intent_threshold = require_number(js, "/settings", "intent_threshold");
        if (!(s.intent_threshold >= 0.0 && s.intent_threshold <= 1.0))
            schema("/settings/intent_threshold", "must be in [0, 1]");
    }
    if (js.contains("message_delay_ms")) {
        const double ms = require_number(js, "/settings", "message_delay_ms");
        if (ms < 0) schema("/settings/message_delay_ms", "must be >= 0");
        s.message_delay = std::chrono::milliseconds(static_cast<long long>(ms));
    }
    if (js.contains("chunk_limit")) {
        const double limit = require_number(js, "/settings", "chunk_limit");
        if (limit < 20) schema("/settings/chunk_limit", "must be >= 20");
        s.chunk_limit = static_cast<std::size_t>(limit);
    }
    if (js.contains("failures_before_full_repeat")) {
        const double n = require_number(js, "/settings", "failures_before_full_repeat");
        if (n < 1) schema("/settings/failures_before_full_repeat", "must be >= 1");
        s.failures_before_full_repeat = static_cast<int>(n);
    }
    if (js.contains("max_quick_replies")) {
        const double n = require_number(js, "/settings", "max_quick_replies");
        if (n < 0) schema("/settings/max_quick_replies", "must be >= 0");
        s.max_quick_replies = static_cast<int>(n);
    }
    return s;
}

scoring::TipiKeying parse_keying(const json& scoring_doc) {
    scoring::TipiKeying keying;
    const json& jk = require(scoring_doc, "/scoring", "tipi_keying");
    std::set<int> used;
    for (const scoring::Trait t : scoring::kAllTraits) {
        const std::string name(scoring::to_string(t));
        const std::string at = "/scoring/tipi_keying/" + name;
        const json& entry = require(jk, "/scoring/tipi_keying", name.c_str());
        const double direct = require_number(entry, at, "direct");
        const double reversed = require_number(entry, at, "reversed");
        auto& k = keying.traits[static_cast<std::size_t>(t)];
        k.direct_item = static_cast<int>(direct);
        k.reversed_item = static_cast<int>(reversed);
        for (const int item : {k.direct_item, k.reversed_item}) {
            if (item < 1 || item > static_cast<int>(kExpectedTipi)) schema(at, "item number outside 1..10");
            if (!used.insert(item).second) schema(at, "item " + std::to_string(item) + " keyed twice");
        }
    }
    return keying;
}

scoring::NormTable parse_norms(const json& scoring_doc) {
    scoring::NormTable norms;
    const json& jn = require(scoring_doc, "/scoring", "norms");
    const std::string at = "/scoring/norms";
    if (jn.contains("trait_band_half_width_sd"))
        norms.trait_band_half_width_sd = require_number(jn, at, "trait_band_half_width_sd");
    if (jn.contains("competency_band_half_width"))
        norms.competency_band_half_width = require_number(jn, at, "competency_band_half_width");
    const json& traits = require(jn, at, "traits");
    for (const scoring::Trait t : scoring::kAllTraits) {
        const std::string name(scoring::to_string(t));
        const json& entry = require(traits, at + "/traits", name.c_str());
        auto& norm = norms.traits[static_cast<std::size_t>(t)];
        norm.mean = require_number(entry, at + "/traits/" + name, "mean");
        norm.sd = require_number(entry, at + "/traits/" + name, "sd");
    }
    const json& means = require(jn, at, "competency_means");
    if (!means.is_array()) schema(at + "/competency_means", "expected an array");
    for (std::size_t i = 0; i < means.size(); ++i) {
        if (!means[i].is_number()) schema(at + "/competency_means/" + std::to_string(i), "expected a number");
        norms.competency_means.push_back(means[i].get<double>());
    }
    if (norms.competency_means.size() != kExpectedCompetency)
        throw ConfigError(ConfigErrorCode::bad_count, at + "/competency_means",
                          "expected 26 competency means, found " + std::to_string(norms.competency_means.size()));
    try {
        norms.validate();
    } catch (const scoring::ScoringError& e) {
        schema(at, e.what());
    }
    return norms;
}

void check_keys(const FlowDefinition& flow) {
    const CatalogSet& catalogs = *flow.catalogs;
    const auto need = [&](const std::string& key, const std::string& at) {
        if (!catalogs.contains(key))
            throw ConfigError(ConfigErrorCode::missing_translation, at, "catalog key '" + key + "' is not defined");
    };
    for (const auto key : kEngineKeys) need(std::string(key), "/catalogs");
    for (const scoring::Trait t : scoring::kAllTraits)
        for (const auto band : {scoring::Band::below, scoring::Band::near, scoring::Band::above})
            need(scoring::feedback_key(t, band), "/catalogs");
    for (std::size_t i = 0; i < flow.phases.size(); ++i) {
        const Phase& p = flow.phases[i];
        const std::string at = "/phases/" + std::to_string(i);
        if (!p.intro_key.empty()) need(p.intro_key, at + "/intro");
        if (!p.hint_key.empty()) need(p.hint_key, at + "/hint");
        for (std::size_t j = 0; j < p.questions.size(); ++j)
            need(p.questions[j].text_key, at + "/questions/" + std::to_string(j) + "/text");
    }
}

}  // namespace

FlowDefinition load_flow(const json& doc, std::shared_ptr<const CatalogSet> catalogs) {
    if (!doc.is_object()) schema("", "flow document must be an object");
    if (!catalogs) throw std::invalid_argument("load_flow: catalogs required");

    FlowDefinition flow;
    flow.catalogs = std::move(catalogs);
    flow.settings = parse_settings(doc);
    flow.intents = parse_intents(doc);

    const json& phases = require(doc, "", "phases");
    if (!phases.is_array()) schema("/phases", "expected an array");
    std::set<std::string> ids;
    bool after_gate = false;
    for (std::size_t i = 0; i < phases.size(); ++i) {
        const std::string at = "/phases/" + std::to_string(i);
        const std::string kind_name = require_string(phases[i], at, "kind");
        const auto kind = parse_phase_kind(kind_name);
        if (!kind) schema(at + "/kind", "unknown phase kind '" + kind_name + "'");

        Phase phase;
        phase.kind = *kind;
        phase.intro_key = optional_string(phases[i], at, "intro");
        phase.hint_key = optional_string(phases[i], at, "hint");
        if (asks_questions(*kind)) {
            if (phase.hint_key.empty()) phase.hint_key = "question.scale_hint";
            const json& qs = require(phases[i], at, "questions");
            if (!qs.is_array() || qs.empty()) schema(at + "/questions", "expected a non-empty array");
            for (std::size_t j = 0; j < qs.size(); ++j) {
                const std::string qat = at + "/questions/" + std::to_string(j);
                QuestionSpec q = parse_question(qs[j], *kind, qat);
                if (!ids.insert(q.id).second) schema(qat + "/id", "duplicate question id '" + q.id + "'");
                if (q.gating && !after_gate) schema(qat + "/gating", "gated question before the employment gate");
                phase.questions.push_back(std::move(q));
            }
        } else if (phases[i].contains("questions")) {
            schema(at + "/questions", "phase '" + kind_name + "' cannot ask questions");
        }
        if (*kind == PhaseKind::employment_gate) after_gate = true;
        flow.phases.push_back(std::move(phase));
    }
    check_phase_order(flow.phases);
    check_counts(flow);

    const json& scoring_doc = require(doc, "", "scoring");
    flow.tipi_keying = parse_keying(scoring_doc);
    flow.norms = parse_norms(scoring_doc);

    check_keys(flow);
    return flow;
}

FlowDefinition load_flow(const json& doc, const std::filesystem::path& base_dir) {
    const json& jc = require(doc, "", "catalogs");
    std::array<Catalog, 3> catalogs;
    for (std::size_t i = 0; i < kAllLocales.size(); ++i) {
        const Locale l = kAllLocales[i];
        const std::string code(to_string(l));
        const std::string path = require_string(jc, "/catalogs", code.c_str());
        try {
            catalogs[i] = Catalog::load(l, base_dir / path);
        } catch (const CatalogParseError& e) {
            schema("/catalogs/" + code, e.what());
        } catch (const std::runtime_error& e) {
            schema("/catalogs/" + code, e.what());
        }
    }
    std::shared_ptr<const CatalogSet> set;
    try {
        set = std::make_shared<const CatalogSet>(std::move(catalogs));
    } catch (const IncompleteCatalogError& e) {
        const auto& first = e.missing().front();
        throw ConfigError(ConfigErrorCode::missing_translation,
                          "/catalogs/" + std::string(to_string(first.locale)) + "#" + first.key, e.what());
    }
    return load_flow(doc, std::move(set));
}

FlowDefinition load_flow_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(ConfigErrorCode::schema_error, path.string(), "cannot open flow config");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(ConfigErrorCode::schema_error, path.string() + "@" + std::to_string(e.byte), e.what());
    }
    return load_flow(doc, path.parent_path());
}

}  // namespace surveybot::flow
