#include <gtest/gtest.h>

#include <httplib.h>
#include <sqlite3.h>

#include <filesystem>

#include "surveybot/gateway/http_server.hpp"
#include "surveybot/gateway/signature.hpp"
#include "test_paths.hpp"

using namespace surveybot;
using namespace surveybot::gateway;
using nlohmann::json;

namespace {

constexpr std::string_view kBody =
    R"({"object":"page","entry":[{"id":"PAGE1","time":1650000000000,"messaging":[{"sender":{"id":"u-100"},)"
    R"("recipient":{"id":"PAGE1"},"timestamp":1650000000000,"message":{"mid":"m1","text":"hello"}}]}]})";
constexpr std::string_view kBodySignature = "sha1=55787bf5a3844f5b03573c4e3a210e0ab39153ac";

ServerConfig test_config() { return load_server_config(surveybot::testing::fixture("server.test.json")); }

class ServerTest : public ::testing::Test {
protected:
    void SetUp() override { start(test_config()); }

    void start(ServerConfig config) {
        server_ = std::make_unique<Server>(std::move(config));
        server_->start();
        client_ = std::make_unique<httplib::Client>("127.0.0.1", server_->port());
        client_->set_read_timeout(10);
    }

    httplib::Result post_signed(std::string_view body, std::string_view signature) {
        return client_->Post("/webhook", httplib::Headers{{"X-Hub-Signature", std::string(signature)}},
                             std::string(body), "application/json");
    }

    json poll(const std::string& user, std::uint64_t after = 0, int wait = 0) {
        server_->sender().wait_idle();
        auto res = client_->Get("/local/messages?user=" + user + "&after=" + std::to_string(after) +
                                "&wait=" + std::to_string(wait));
        EXPECT_TRUE(res);
        EXPECT_EQ(res->status, 200);
        return json::parse(res->body);
    }

    httplib::Result local(const std::string& user, const std::string& text) {
        return client_->Post("/local/messages", json{{"sender", {{"id", user}}}, {"message", {{"text", text}}}}.dump(),
                             "application/json");
    }

    std::unique_ptr<Server> server_;
    std::unique_ptr<httplib::Client> client_;
};

}  // namespace

TEST(ServerConfig, ResolvesPathsAndRejectsUnknownKeys) {
    const auto c = test_config();
    EXPECT_EQ(c.storage_path, ":memory:");
    EXPECT_EQ(c.messenger_transport, "loopback");
    EXPECT_TRUE(std::filesystem::exists(c.flow_path));
    EXPECT_TRUE(c.profile_fixture && std::filesystem::exists(*c.profile_fixture));
    EXPECT_EQ(c.message_delay_ms, 0);
    EXPECT_THROW(server_config_from_json(json::parse(R"({"prot": 1})"), "."), std::invalid_argument);
    EXPECT_THROW(server_config_from_json(json::parse(R"({"messenger_transport": "smtp"})"), "."),
                 std::invalid_argument);

    const auto shipped = load_server_config(surveybot::testing::config_dir() / "local.json");
    EXPECT_EQ(shipped.storage_path, ":memory:");
}

TEST(ServerConfig, EnvironmentOverridesSecrets) {
    auto c = test_config();
    setenv("SURVEYBOT_APP_SECRET", "from-env", 1);
    setenv("SURVEYBOT_MESSAGE_DELAY_MS", "25", 1);
    apply_environment(c);
    unsetenv("SURVEYBOT_APP_SECRET");
    unsetenv("SURVEYBOT_MESSAGE_DELAY_MS");
    EXPECT_EQ(c.app_secret, "from-env");
    EXPECT_EQ(c.message_delay_ms, 25);
}

TEST_F(ServerTest, HealthAndUiMount) {
    auto res = client_->Get("/health");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    res = client_->Get("/ui/index.html");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_NE(res->body.find("chat ui placeholder"), std::string::npos);
}

TEST_F(ServerTest, HandshakeEchoesChallenge) {
    auto res = client_->Get("/webhook?hub.mode=subscribe&hub.verify_token=test-verify-token&hub.challenge=abc123");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(res->body, "abc123");
    res = client_->Get("/webhook?hub.mode=subscribe&hub.verify_token=wrong&hub.challenge=abc123");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 403);
}

TEST_F(ServerTest, SignedEventAcceptedTamperedRejected) {
    auto res = post_signed(kBody, kBodySignature);
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(res->body, "EVENT_RECEIVED");
    const auto replies = poll("u-100");
    EXPECT_FALSE(replies["messages"].empty());

    std::string tampered(kBody);
    tampered[tampered.find("hello") + 4] ^= 0x02;
    res = post_signed(tampered, kBodySignature);
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 403);
    res = post_signed(kBody, "");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 403);

    const std::string junk = "not json";
    res = post_signed(junk, "sha1=" + hmac_sha1_hex("test-app-secret", junk));
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 400);

    // Redelivery of the same event is acknowledged but not processed twice.
    const auto before = poll("u-100")["messages"].size();
    res = post_signed(kBody, kBodySignature);
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(poll("u-100")["messages"].size(), before);
}

TEST_F(ServerTest, LoopbackConversationAndTranscript) {
    auto res = local("web-1", "hi");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(json::parse(res->body)["outcome"], "processed");
    auto got = poll("web-1");
    const auto& messages = got["messages"];
    ASSERT_GE(messages.size(), 2u);
    EXPECT_EQ(messages.back()["kind"], "question");
    EXPECT_TRUE(messages.back()["last_in_batch"].get<bool>());
    EXPECT_EQ(messages.back()["message"]["quick_replies"].size(), 3u);
    EXPECT_FALSE(got["finalized"].get<bool>());
    const auto last_seq = messages.back()["seq"].get<std::uint64_t>();

    // Same text twice in a row must both count (no timestamp, no dedupe).
    local("web-1", "3");
    local("web-1", "4");
    local("web-1", "4");
    const auto later = poll("web-1", last_seq, 1000);
    EXPECT_GE(later["messages"].size(), 3u);
    EXPECT_EQ(server_->storage().find_latest("web-1")->tipi[1], 4);

    const auto session = server_->gateway().session_for_user("web-1");
    ASSERT_TRUE(session);
    res = client_->Get("/sessions/" + *session + "/transcript");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    const auto t = json::parse(res->body);
    EXPECT_EQ(t["user_id"], "web-1");
    EXPECT_EQ(t["entries"][0]["direction"], "inbound");
    EXPECT_EQ(t["entries"][0]["text"], "hi");

    res = client_->Get("/sessions/9999/transcript");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 404);
}

TEST_F(ServerTest, LocalEndpointValidatesInput) {
    auto res = client_->Post("/local/messages", "{", "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 400);
    res = local("web-2", "   ");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 400);
    res = client_->Get("/local/messages");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 400);
}

TEST_F(ServerTest, StorageFailureAnswers500AndRedeliverySucceeds) {
    const auto db = std::filesystem::temp_directory_path() / "surveybot_http_server_test.db";
    std::filesystem::remove(db);
    server_->stop();
    auto config = test_config();
    config.storage_path = db.string();
    start(config);

    sqlite3* raw = nullptr;
    ASSERT_EQ(sqlite3_open(db.c_str(), &raw), SQLITE_OK);
    auto exec = [&](const char* sql) { ASSERT_EQ(sqlite3_exec(raw, sql, nullptr, nullptr, nullptr), SQLITE_OK); };
    exec("CREATE TRIGGER fail_insert BEFORE INSERT ON records BEGIN SELECT RAISE(ABORT, 'injected'); END");

    auto res = post_signed(kBody, kBodySignature);
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 500);
    EXPECT_TRUE(poll("u-100")["messages"].empty());

    exec("DROP TRIGGER fail_insert");
    sqlite3_close(raw);
    res = post_signed(kBody, kBodySignature);
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_FALSE(poll("u-100")["messages"].empty());

    server_->stop();
    server_.reset();
    std::filesystem::remove(db);
    std::filesystem::remove(db.string() + "-wal");
    std::filesystem::remove(db.string() + "-shm");
}
