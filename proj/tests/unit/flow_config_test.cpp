#include <gtest/gtest.h>

#include <fstream>

#include "surveybot/flow/config.hpp"
#include "surveybot/flow/intent.hpp"
#include "surveybot/flow/validate.hpp"
#include "test_paths.hpp"

using namespace surveybot;
using namespace surveybot::flow;
using nlohmann::json;

namespace {

json shipped_doc() {
    std::ifstream in(surveybot::testing::config_dir() / "flow.json");
    return json::parse(in);
}

std::shared_ptr<const CatalogSet> shipped_catalogs() {
    static auto set = std::make_shared<const CatalogSet>(CatalogSet::load_directory(surveybot::testing::config_dir()));
    return set;
}

ConfigError expect_error(const json& doc) {
    try {
        load_flow(doc, shipped_catalogs());
    } catch (const ConfigError& e) {
        return e;
    }
    ADD_FAILURE() << "flow was accepted";
    return ConfigError(ConfigErrorCode::schema_error, "", "");
}

json& phase(json& doc, std::string_view kind) {
    for (auto& p : doc["phases"])
        if (p["kind"] == kind) return p;
    throw std::logic_error("no phase");
}

}  // namespace

TEST(FlowConfig, ShippedFlowLoads) {
    const auto flow = load_flow_file(surveybot::testing::config_dir() / "flow.json");
    EXPECT_EQ(flow.count_questions(Instrument::tipi), 10u);
    EXPECT_EQ(flow.count_questions(Instrument::competency), 26u);
    EXPECT_EQ(flow.count_questions(Instrument::sus), 10u);
    // Four demographic items plus the employment question.
    EXPECT_EQ(flow.count_questions(Instrument::meta), 5u);
    EXPECT_DOUBLE_EQ(flow.settings.intent_threshold, 0.45);
    EXPECT_EQ(flow.settings.message_delay.count(), 800);
    EXPECT_EQ(flow.tipi_keying.traits[0].direct_item, 1);
    EXPECT_EQ(flow.tipi_keying.traits[0].reversed_item, 6);
    EXPECT_EQ(flow.phases.front().kind, PhaseKind::greeting);
    EXPECT_EQ(flow.phases.back().kind, PhaseKind::farewell);
    for (const auto* q : {flow.find_question("competency.q1"), flow.find_question("competency.q26")}) {
        ASSERT_NE(q, nullptr);
        EXPECT_EQ(q->gating, std::string(kGateEmployedYes));
    }
}

TEST(FlowConfig, MissingTranslationNamesKey) {
    auto doc = shipped_doc();
    phase(doc, "tipi")["questions"][0]["text"] = "tipi.q99";
    const auto e = expect_error(doc);
    EXPECT_EQ(e.code(), ConfigErrorCode::missing_translation);
    EXPECT_NE(std::string(e.what()).find("tipi.q99"), std::string::npos);
    EXPECT_EQ(e.position(), "/phases/2/questions/0/text");
}

TEST(FlowConfig, CatalogMissingKeyInOneLocale) {
    const auto dir = std::filesystem::temp_directory_path() / "surveybot_flow_config_test";
    std::filesystem::create_directories(dir);
    for (const char* code : {"pl", "uk", "en"})
        std::filesystem::copy_file(surveybot::testing::config_dir() / ("catalog." + std::string(code) + ".txt"),
                                   dir / ("catalog." + std::string(code) + ".txt"),
                                   std::filesystem::copy_options::overwrite_existing);
    std::ofstream(dir / "catalog.uk.txt", std::ios::app) << "extra.key=тільки тут\n";
    try {
        load_flow(shipped_doc(), dir);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.code(), ConfigErrorCode::missing_translation);
        EXPECT_NE(e.position().find("extra.key"), std::string::npos);
    }
    std::filesystem::remove_all(dir);
}

TEST(FlowConfig, IntentWithoutPhraseForALocale) {
    auto doc = shipped_doc();
    doc["intents"][3]["triggers"].erase("uk");
    EXPECT_EQ(expect_error(doc).code(), ConfigErrorCode::missing_translation);
}

TEST(FlowConfig, WrongItemCounts) {
    auto doc = shipped_doc();
    phase(doc, "tipi")["questions"].erase(9);
    auto e = expect_error(doc);
    EXPECT_EQ(e.code(), ConfigErrorCode::bad_count);

    doc = shipped_doc();
    auto& sus = phase(doc, "sus")["questions"];
    json extra = sus[9];
    extra["id"] = "sus.q11";
    sus.push_back(extra);
    EXPECT_EQ(expect_error(doc).code(), ConfigErrorCode::bad_count);

    doc = shipped_doc();
    doc["scoring"]["norms"]["competency_means"].erase(0);
    EXPECT_EQ(expect_error(doc).code(), ConfigErrorCode::bad_count);
}

TEST(FlowConfig, SchemaViolations) {
    auto doc = shipped_doc();
    phase(doc, "tipi")["questions"][0]["scale"] = json::array({1, 9});
    EXPECT_EQ(expect_error(doc).code(), ConfigErrorCode::schema_error);

    doc = shipped_doc();
    phase(doc, "sus")["questions"][1]["id"] = "sus.q1";
    EXPECT_EQ(expect_error(doc).code(), ConfigErrorCode::schema_error);

    doc = shipped_doc();
    std::swap(doc["phases"][2], doc["phases"][3]);
    EXPECT_EQ(expect_error(doc).code(), ConfigErrorCode::schema_error);

    doc = shipped_doc();
    phase(doc, "tipi")["questions"][0]["gating"] = std::string(kGateEmployedYes);
    EXPECT_EQ(expect_error(doc).code(), ConfigErrorCode::schema_error);

    doc = shipped_doc();
    doc["settings"]["intent_threshold"] = 1.5;
    auto e = expect_error(doc);
    EXPECT_EQ(e.code(), ConfigErrorCode::schema_error);
    EXPECT_EQ(e.position(), "/settings/intent_threshold");

    doc = shipped_doc();
    doc["phases"][0]["kind"] = "interview";
    EXPECT_EQ(expect_error(doc).code(), ConfigErrorCode::schema_error);

    doc = shipped_doc();
    doc["scoring"]["tipi_keying"]["openness"]["reversed"] = 6;  // already used by extraversion
    EXPECT_EQ(expect_error(doc).code(), ConfigErrorCode::schema_error);
}

TEST(Validate, AcceptsOnlyOneIntegerInRange) {
    QuestionSpec q;
    q.scale_min = 1;
    q.scale_max = 7;
    EXPECT_EQ(std::get<int>(validate_answer(q, " 7 ")), 7);
    EXPECT_EQ(std::get<int>(validate_answer(q, "1")), 1);
    const ValidationError non_numeric{ValidationErrorCode::non_numeric, 1, 7};
    const ValidationError out_of_range{ValidationErrorCode::out_of_range, 1, 7};
    EXPECT_EQ(std::get<ValidationError>(validate_answer(q, "abc")), non_numeric);
    EXPECT_EQ(std::get<ValidationError>(validate_answer(q, "3 4")), non_numeric);
    EXPECT_EQ(std::get<ValidationError>(validate_answer(q, "4.5")), non_numeric);
    EXPECT_EQ(std::get<ValidationError>(validate_answer(q, "0")), out_of_range);
    EXPECT_EQ(std::get<ValidationError>(validate_answer(q, "8")), out_of_range);
    EXPECT_EQ(std::get<ValidationError>(validate_answer(q, "99999999999999999999")), out_of_range);
}

TEST(Intent, JaccardOverTokenSets) {
    EXPECT_DOUBLE_EQ(jaccard({"a", "b"}, {"b", "c"}), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(jaccard({}, {}), 0.0);
    EXPECT_DOUBLE_EQ(jaccard({"x", "x"}, {"x"}), 1.0);
}

TEST(Intent, MatchesAboveThresholdElseFallback) {
    const auto flow = load_flow(shipped_doc(), shipped_catalogs());
    const auto m = match_intent("Po polsku proszę", flow.intents, std::nullopt, 0.45);
    ASSERT_FALSE(m.is_fallback());
    EXPECT_EQ(m.intent->name, "language.pl");

    const auto uk = match_intent("УКРАЇНСЬКА", flow.intents, std::nullopt, 0.45);
    ASSERT_FALSE(uk.is_fallback());
    EXPECT_EQ(uk.intent->name, "language.uk");

    const auto none = match_intent("what is this", flow.intents, std::nullopt, 0.45);
    EXPECT_TRUE(none.is_fallback());
    EXPECT_LT(none.score, 0.45);

    // Locale restriction: the Polish "nie" is not an English trigger.
    EXPECT_TRUE(match_intent("nie", flow.intents, Locale::en, 0.45).is_fallback());
    EXPECT_THROW(match_intent("x", flow.intents, std::nullopt, 1.5), std::invalid_argument);
}
