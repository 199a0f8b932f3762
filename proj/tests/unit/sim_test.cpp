#include <gtest/gtest.h>

#include "surveybot/gateway/http_server.hpp"
#include "surveybot/sim/runner.hpp"
#include "test_paths.hpp"

using namespace surveybot;
using namespace surveybot::sim;

namespace {

class SimTest : public ::testing::Test {
protected:
    void SetUp() override {
        server_ = std::make_unique<gateway::Server>(
            gateway::load_server_config(surveybot::testing::fixture("server.test.json")));
        server_->start();
        client_ = std::make_unique<LoopbackClient>(server_->base_url());
    }
    RunOptions quick() const {
        RunOptions o;
        o.timeout = std::chrono::milliseconds(2000);
        return o;
    }

    std::unique_ptr<gateway::Server> server_;
    std::unique_ptr<LoopbackClient> client_;
};

}  // namespace

TEST(TranscriptParse, DirectivesStepsAndLines) {
    const auto t = parse_transcript(
        "# comment\n@user alice\n@locale en\n@expect-finalized\n\n> hi\n< Hello\\nworld\n< /^Type \\d/\n---\n> 3\n");
    EXPECT_EQ(t.user, "alice");
    EXPECT_EQ(t.locale, "en");
    EXPECT_TRUE(t.expect_finalized);
    ASSERT_EQ(t.steps.size(), 5u);
    EXPECT_EQ(std::get<Send>(t.steps[0].action).text, "hi");
    EXPECT_EQ(t.steps[0].line, 6);
    EXPECT_EQ(std::get<ExpectExact>(t.steps[1].action).text, "Hello\nworld");
    EXPECT_TRUE(std::regex_search("Type 3 now", std::get<ExpectPattern>(t.steps[2].action).pattern));
    EXPECT_TRUE(std::holds_alternative<ExpectBatchEnd>(t.steps[3].action));
    EXPECT_EQ(t.steps[4].line, 10);
}

TEST(TranscriptParse, Errors) {
    auto line_of = [](const std::string& text) {
        try {
            parse_transcript(text);
        } catch (const TranscriptParseError& e) {
            return e.line();
        }
        return -1;
    };
    EXPECT_EQ(line_of("< starts with an expectation\n"), 1);
    EXPECT_EQ(line_of("> hi\n\nbogus line\n"), 3);
    EXPECT_EQ(line_of("> hi\n< /unclosed(/\n"), 2);
    EXPECT_EQ(line_of("@colour blue\n> hi\n"), 1);
    EXPECT_EQ(line_of("# nothing\n"), 1);
}

TEST(TranscriptParse, EscapesRoundTrip) {
    for (const std::string s : {"plain", "two\nlines", "back\\slash", "mix\\n\n"})
        EXPECT_EQ(unescape_line(escape_line(s)), s);
    EXPECT_EQ(escape_line("a\nb"), "a\\nb");
}

TEST_F(SimTest, RecordedScriptReplaysAndWrongExpectationFailsAtStep) {
    Transcript sends = parse_transcript("@user rec-1\n> hi\n> 3\n> abc\n");
    const std::string golden = record_script(sends, *client_, quick());
    EXPECT_NE(golden.find("---"), std::string::npos);

    auto replay = parse_transcript(golden);
    replay.user = "rec-2";
    const auto ok = run_script(replay, *client_, quick());
    EXPECT_TRUE(ok.passed()) << ok.summary();
    EXPECT_FALSE(ok.received.empty());

    // Break the first expectation after the second send.
    std::size_t sends_seen = 0, target = 0;
    for (std::size_t i = 0; i < replay.steps.size(); ++i) {
        if (std::holds_alternative<Send>(replay.steps[i].action)) ++sends_seen;
        else if (sends_seen == 2 && std::holds_alternative<ExpectExact>(replay.steps[i].action)) {
            target = i;
            break;
        }
    }
    ASSERT_GT(target, 0u);
    replay.steps[target].action = ExpectExact{"something else entirely"};
    replay.user = "rec-3";
    const auto bad = run_script(replay, *client_, quick());
    EXPECT_EQ(bad.verdict, Verdict::mismatch);
    EXPECT_EQ(bad.step, static_cast<int>(target));
    EXPECT_EQ(bad.line, replay.steps[target].line);
    EXPECT_EQ(bad.summary().rfind("FAIL MISMATCH at step " + std::to_string(target), 0), 0u) << bad.summary();
}

TEST_F(SimTest, MissingFinalizationIsReported) {
    Transcript t = parse_transcript("@user fin-1\n@expect-finalized\n> hi\n< /./\n");
    // The greeting batch has more than one message, so the first run fails on leftovers.
    auto r = run_script(t, *client_, quick());
    EXPECT_FALSE(r.passed());

    t = parse_transcript(record_script(parse_transcript("@user fin-2\n> hi\n"), *client_, quick()));
    t.user = "fin-3";
    t.expect_finalized = true;
    r = run_script(t, *client_, quick());
    EXPECT_EQ(r.verdict, Verdict::not_finalized);
}

TEST_F(SimTest, TimeoutWhenNothingArrives) {
    // A script that expects more messages than the batch holds times out.
    const auto golden = parse_transcript(record_script(parse_transcript("@user slow-2\n> hi\n"), *client_, quick()));
    Transcript longer = golden;
    longer.user = "slow-3";
    longer.steps.push_back({ExpectExact{"never sent"}, 99});
    RunOptions o = quick();
    o.timeout = std::chrono::milliseconds(300);
    const auto r = run_script(longer, *client_, o);
    EXPECT_EQ(r.verdict, Verdict::timeout);
    EXPECT_EQ(r.line, 99);
}

TEST(LoopbackClient, ConnectionFailureIsAClientError) {
    LoopbackClient c("http://127.0.0.1:1");
    EXPECT_THROW(c.send_text("u", "hi"), ClientError);
}
