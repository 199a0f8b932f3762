#include <gtest/gtest.h>

#include <httplib.h>

#include <thread>

#include "surveybot/gateway/profile.hpp"
#include "surveybot/gateway/protocol.hpp"
#include "surveybot/gateway/signature.hpp"
#include "surveybot/gateway/transport.hpp"

using namespace surveybot;
using namespace surveybot::gateway;

namespace {

// Digests computed with Python's hmac module and frozen here.
constexpr std::string_view kSecret = "test-app-secret";
constexpr std::string_view kBody =
    R"({"object":"page","entry":[{"id":"PAGE1","time":1650000000000,"messaging":[{"sender":{"id":"u-100"},)"
    R"("recipient":{"id":"PAGE1"},"timestamp":1650000000000,"message":{"mid":"m1","text":"hello"}}]}]})";
constexpr std::string_view kBodySignature = "sha1=55787bf5a3844f5b03573c4e3a210e0ab39153ac";

/// A stand-in for the Graph API on a loopback port.
class FakeGraph {
public:
    FakeGraph() {
        server_.Get(R"(/v1/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
            const std::string user = req.matches[1];
            if (user == "blocked") {
                res.status = 403;
                res.set_content(R"({"error":{"message":"forbidden"}})", "application/json");
                return;
            }
            last_token_ = req.get_param_value("access_token");
            res.set_content(R"({"first_name":"Olena","locale":"uk_UA","timezone":"+3.0",)"
                            R"("hometown":{"name":"Львів"}})",
                            "application/json");
        });
        server_.Post("/v1/me/messages", [this](const httplib::Request& req, httplib::Response& res) {
            last_send_ = nlohmann::json::parse(req.body);
            last_token_ = req.get_param_value("access_token");
            if (last_send_["message"]["text"] == "fail") res.status = 500;
            else res.set_content(R"({"message_id":"x"})", "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~FakeGraph() {
        server_.stop();
        thread_.join();
    }
    std::string base() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

    nlohmann::json last_send_;
    std::string last_token_;

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace

TEST(Signature, Rfc2202Vector) {
    EXPECT_EQ(hmac_sha1_hex("Jefe", "what do ya want for nothing?"), "effcdf6ae5eb2fa2d27416d5f184df9c259a7c79");
}

TEST(Signature, AcceptsFrozenEnvelopeDigest) {
    EXPECT_EQ("sha1=" + hmac_sha1_hex(kSecret, kBody), kBodySignature);
    EXPECT_EQ(verify_signature(kBody, kBodySignature, kSecret), SignatureCheck::accept);
}

TEST(Signature, RejectsTamperingAndBadHeaders) {
    std::string tampered(kBody);
    const auto at = tampered.find("hello") + 4;
    tampered[at] = static_cast<char>(tampered[at] ^ 0x02);  // one bit: "hello" -> "hellm"
    EXPECT_EQ(verify_signature(tampered, kBodySignature, kSecret), SignatureCheck::mismatch);
    EXPECT_EQ(verify_signature(kBody, kBodySignature, "other-secret"), SignatureCheck::mismatch);
    EXPECT_EQ(verify_signature(kBody, "", kSecret), SignatureCheck::malformed_header);
    EXPECT_EQ(verify_signature(kBody, "sha256=55787bf5a3844f5b03573c4e3a210e0ab39153ac", kSecret),
              SignatureCheck::malformed_header);
    EXPECT_EQ(verify_signature(kBody, "sha1=55787BF5A3844F5B03573C4E3A210E0AB39153AC", kSecret),
              SignatureCheck::malformed_header);
    EXPECT_EQ(verify_signature(kBody, "sha1=55787bf5", kSecret), SignatureCheck::malformed_header);
}

TEST(Subscription, EchoesChallengeOnlyForTheRightToken) {
    std::map<std::string, std::string> q{
        {"hub.mode", "subscribe"}, {"hub.verify_token", "tok"}, {"hub.challenge", "abc123"}};
    EXPECT_EQ(verify_subscription(q, "tok"), "abc123");
    EXPECT_FALSE(verify_subscription(q, "tok2"));
    EXPECT_FALSE(verify_subscription(q, ""));
    q["hub.mode"] = "unsubscribe";
    EXPECT_FALSE(verify_subscription(q, "tok"));
    q.erase("hub.mode");
    EXPECT_FALSE(verify_subscription(q, "tok"));
}

TEST(Webhook, ParsesMessagesQuickRepliesAndSkipsEchoes) {
    const auto parsed = parse_webhook_body(R"({"object":"page","entry":[{"id":"P","messaging":[
        {"sender":{"id":"u1"},"recipient":{"id":"P"},"timestamp":5,"message":{"mid":"a","text":"hi"}},
        {"sender":{"id":"P"},"recipient":{"id":"u1"},"timestamp":6,"message":{"is_echo":true,"text":"bot"}},
        {"sender":{"id":"u1"},"recipient":{"id":"P"},"timestamp":7,
         "message":{"text":"Strongly agree","quick_reply":{"payload":"5"}}},
        {"sender":{"id":"u2"},"recipient":{"id":"P"},"timestamp":8,"read":{"watermark":1}},
        {"sender":{"id":"u3"},"recipient":{"id":"P"},"timestamp":9,"postback":{"title":"Start","payload":"GO"}}
    ]}]})");
    ASSERT_EQ(parsed.events.size(), 3u);
    EXPECT_EQ(parsed.skipped.size(), 2u);
    EXPECT_EQ(parsed.events[0].sender_id, "u1");
    EXPECT_EQ(parsed.events[0].timestamp, 5);
    EXPECT_EQ(parsed.events[0].answer_text(), "hi");
    EXPECT_EQ(parsed.events[1].answer_text(), "5");
    EXPECT_EQ(parsed.events[1].message_text, "Strongly agree");
    EXPECT_EQ(parsed.events[2].answer_text(), "GO");

    EXPECT_THROW(parse_webhook_body("{not json"), std::invalid_argument);
    EXPECT_THROW(parse_webhook_body(R"({"object":"user","entry":[]})"), std::invalid_argument);
}

TEST(LocalMessage, RequiresSenderAndMessage) {
    const auto e = parse_local_message(nlohmann::json::parse(
        R"({"sender":{"id":"sim-1"},"message":{"text":"3","quick_reply":{"payload":"3"}},"timestamp":42})"));
    EXPECT_EQ(e.sender_id, "sim-1");
    EXPECT_EQ(e.answer_text(), "3");
    EXPECT_EQ(e.timestamp, 42);
    EXPECT_THROW(parse_local_message(nlohmann::json::parse(R"({"message":{"text":"x"}})")), std::invalid_argument);
    EXPECT_THROW(parse_local_message(nlohmann::json::parse(R"({"sender":{"id":"a"}})")), std::invalid_argument);
}

TEST(SendApi, BodyShape) {
    flow::OutboundMessage m;
    m.recipient_id = "u-7";
    m.text = "Pick one";
    m.quick_replies = {{"1", 1}, {"2", 2}};
    const auto expected = nlohmann::json::parse(R"({"recipient":{"id":"u-7"},"messaging_type":"RESPONSE",
        "message":{"text":"Pick one","quick_replies":[
            {"content_type":"text","title":"1","payload":"1"},{"content_type":"text","title":"2","payload":"2"}]}})");
    EXPECT_EQ(send_api_body(m), expected);
    m.quick_replies.clear();
    EXPECT_FALSE(send_api_body(m)["message"].contains("quick_replies"));
}

TEST(Profile, ParsesGraphShapes) {
    const auto p = profile_from_json(nlohmann::json::parse(
        R"({"first_name":"Zofia","last_name":"","timezone":"+2.0","hometown":"Łódź","gender":"female"})"));
    EXPECT_EQ(p.first_name, "Zofia");
    EXPECT_EQ(p.last_name, std::nullopt);
    EXPECT_EQ(p.timezone, 2.0);
    EXPECT_EQ(p.hometown, "Łódź");
    EXPECT_EQ(profile_from_json(nlohmann::json::parse(R"({"timezone":-5})")).timezone, -5.0);
    EXPECT_EQ(profile_from_json(nlohmann::json::parse(R"({"timezone":"soon"})")).timezone, std::nullopt);
}

TEST(Profile, FixtureFallsBackToWildcard) {
    FixtureProfileProvider f(nlohmann::json::parse(R"({"a":{"first_name":"A"},"*":{"first_name":"Any"}})"));
    EXPECT_EQ(f.fetch("a").first_name, "A");
    EXPECT_EQ(f.fetch("zzz").first_name, "Any");
    FixtureProfileProvider empty(nlohmann::json::object());
    EXPECT_EQ(empty.fetch("a"), ProfileAttributes{});
}

TEST(Profile, GraphFetchAndPermissionDenialDegrades) {
    FakeGraph graph;
    GraphProfileProvider provider(graph.base(), "page-token");
    const auto ok = fetch_profile(provider, "u-1");
    EXPECT_EQ(ok.first_name, "Olena");
    EXPECT_EQ(ok.timezone, 3.0);
    EXPECT_EQ(ok.hometown, "Львів");
    EXPECT_EQ(graph.last_token_, "page-token");

    EXPECT_THROW(provider.fetch("blocked"), std::runtime_error);
    EXPECT_EQ(fetch_profile(provider, "blocked"), ProfileAttributes{});

    GraphProfileProvider unreachable("http://127.0.0.1:1/v1", "t");
    EXPECT_EQ(fetch_profile(unreachable, "u-1"), ProfileAttributes{});
}

TEST(Transport, GraphSendPostsSendApiBody) {
    FakeGraph graph;
    GraphSendTransport t(graph.base(), "tok en");
    flow::OutboundMessage m;
    m.recipient_id = "u-5";
    m.text = "Dzień dobry";
    t.send(m);
    EXPECT_EQ(graph.last_send_, send_api_body(m));
    EXPECT_EQ(graph.last_token_, "tok en");
    m.text = "fail";
    EXPECT_THROW(t.send(m), TransportError);
}

TEST(Transport, LoopbackMailboxes) {
    LoopbackTransport t;
    flow::OutboundMessage m;
    m.recipient_id = "a";
    for (std::uint64_t s = 1; s <= 3; ++s) {
        m.seq = s;
        t.send(m);
    }
    EXPECT_EQ(t.messages_after("a", 1).size(), 2u);
    EXPECT_TRUE(t.messages_after("b", 0).empty());
    EXPECT_TRUE(t.wait_after("a", 3, std::chrono::milliseconds(20)).empty());
    EXPECT_EQ(t.users(), std::vector<std::string>{"a"});
}
