#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "surveybot/flow/config.hpp"
#include "surveybot/gateway/gateway.hpp"
#include "test_paths.hpp"

using namespace surveybot;
using namespace surveybot::gateway;
using namespace std::chrono_literals;

namespace {

std::shared_ptr<const flow::FlowEngine> shipped_engine() {
    static auto engine = std::make_shared<const flow::FlowEngine>(std::make_shared<const flow::FlowDefinition>(
        flow::load_flow_file(surveybot::testing::config_dir() / "flow.json")));
    return engine;
}

/// SQLite storage that can be told to fail the next answer write.
class FlakyStorage : public persistence::SqliteStorage {
public:
    FlakyStorage() : SqliteStorage(":memory:") {}
    void save_answer(std::int64_t id, std::string_view q, int v) override {
        if (fail_next_answer.exchange(false))
            throw persistence::StorageError(persistence::StorageErrorCode::storage, "disk on fire");
        SqliteStorage::save_answer(id, q, v);
    }
    std::atomic<bool> fail_next_answer{false};
};

class ThrowingProfiles : public ProfileProvider {
public:
    ProfileAttributes fetch(const std::string&) override { throw std::runtime_error("HTTP 403"); }
};

struct Rig {
    explicit Rig(ProfileProvider* custom_profiles = nullptr)
        : profiles(nlohmann::json::parse(R"({"*":{"first_name":"Zofia","locale":"pl_PL","timezone":"+2.0"}})")),
          sender(SenderOptions{4, 0ms, 1, 1ms}),
          gateway(shipped_engine(), storage, custom_profiles ? *custom_profiles : profiles, sender, loopback,
                  loopback) {}

    EventOutcome say(const std::string& user, const std::string& text) {
        InboundEvent e;
        e.sender_id = user;
        e.message_text = text;
        e.timestamp = ++clock;
        return gateway.handle_event(e, Channel::loopback);
    }

    std::vector<std::string> texts(const std::string& user) {
        sender.wait_idle();
        std::vector<std::string> out;
        for (const auto& m : loopback.messages_after(user, 0)) out.push_back(m.text);
        return out;
    }

    FlakyStorage storage;
    FixtureProfileProvider profiles;
    LoopbackTransport loopback;
    OrderedSender sender;
    Gateway gateway;
    std::int64_t clock = 1650000000000;
};

void complete_survey(Rig& rig, const std::string& user, const std::string& language, bool employed) {
    ASSERT_EQ(rig.say(user, "hi"), EventOutcome::processed);
    ASSERT_EQ(rig.say(user, language), EventOutcome::processed);
    for (int i = 0; i < 10; ++i) ASSERT_EQ(rig.say(user, std::to_string(1 + i % 7)), EventOutcome::processed);
    rig.say(user, employed ? "1" : "2");
    if (employed)
        for (int i = 0; i < 26; ++i) rig.say(user, "4");
    for (const char* a : {"29", "5", "2", "1"}) rig.say(user, a);
    for (int i = 0; i < 10; ++i) rig.say(user, i % 2 ? "2" : "4");
}

}  // namespace

TEST(Gateway, FirstContactCreatesRecordWithProfile) {
    Rig rig;
    EXPECT_EQ(rig.say("u1", "hello"), EventOutcome::processed);
    const auto r = rig.storage.find_latest("u1");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->profile.first_name, "Zofia");
    EXPECT_EQ(r->profile.timezone, 2.0);
    EXPECT_EQ(rig.gateway.session_for_user("u1"), std::to_string(r->id));
    EXPECT_FALSE(rig.texts("u1").empty());
}

TEST(Gateway, ProfileFailureDegradesToEmptyProfile) {
    ThrowingProfiles denied;
    Rig rig(&denied);
    EXPECT_EQ(rig.say("u1", "hello"), EventOutcome::processed);
    EXPECT_EQ(rig.storage.find_latest("u1")->profile, ProfileAttributes{});
}

TEST(Gateway, RejectsBlankAndDeduplicatesRedelivery) {
    Rig rig;
    EXPECT_EQ(rig.say("u1", "   "), EventOutcome::rejected);
    EXPECT_EQ(rig.say("", "hi"), EventOutcome::rejected);

    InboundEvent e;
    e.sender_id = "u1";
    e.message_text = "hi";
    e.timestamp = 77;
    EXPECT_EQ(rig.gateway.handle_event(e, Channel::loopback), EventOutcome::processed);
    EXPECT_EQ(rig.gateway.handle_event(e, Channel::loopback), EventOutcome::duplicate);
    e.timestamp = 78;
    EXPECT_EQ(rig.gateway.handle_event(e, Channel::loopback), EventOutcome::processed);
}

TEST(Gateway, StorageFailureLeavesNoTraceAndRedeliveryWorks) {
    Rig rig;
    rig.say("u1", "hi");
    rig.say("u1", "3");
    const auto before = rig.texts("u1").size();

    InboundEvent e;
    e.sender_id = "u1";
    e.message_text = "5";
    e.timestamp = 4242;
    rig.storage.fail_next_answer = true;
    EXPECT_EQ(rig.gateway.handle_event(e, Channel::loopback), EventOutcome::storage_error);
    EXPECT_EQ(rig.texts("u1").size(), before);
    const auto record = rig.storage.find_latest("u1");
    EXPECT_EQ(record->tipi[0], std::nullopt);

    EXPECT_EQ(rig.gateway.handle_event(e, Channel::loopback), EventOutcome::processed);
    EXPECT_EQ(rig.storage.find_latest("u1")->tipi[0], 5);
    EXPECT_GT(rig.texts("u1").size(), before);
}

TEST(Gateway, CompletedSurveyIsPersistedAndClosed) {
    Rig rig;
    complete_survey(rig, "u1", "1", true);
    const auto r = rig.storage.find_latest("u1");
    ASSERT_TRUE(r);
    EXPECT_TRUE(r->finalized);
    EXPECT_TRUE(rig.gateway.finalized("u1"));
    EXPECT_EQ(r->language, "pl");
    EXPECT_EQ(r->employed, "yes");
    EXPECT_TRUE(r->tipi_complete());
    EXPECT_TRUE(r->sus_complete());
    EXPECT_EQ(r->age, 29);
    EXPECT_EQ(r->device, "computer");
    EXPECT_EQ(r->immigrant, 0);
    EXPECT_EQ(r->competency[25], 4);
    EXPECT_TRUE(persistence::scores_consistent(*r, shipped_engine()->flow().tipi_keying));

    const auto count = rig.storage.list({}).size();
    EXPECT_EQ(rig.say("u1", "again?"), EventOutcome::processed);
    EXPECT_EQ(rig.storage.list({}).size(), count);
    EXPECT_EQ(rig.texts("u1").back(), shipped_engine()->flow().catalogs->resolve("survey.complete", Locale::pl));

    const auto log = rig.gateway.transcript(std::to_string(r->id));
    ASSERT_FALSE(log.empty());
    EXPECT_EQ(log.front().direction, TranscriptEntry::Direction::inbound);
    EXPECT_EQ(log.front().text, "hi");
}

TEST(Gateway, ConcurrentEventsForOneUserAreSerialized) {
    Rig rig;
    rig.say("u1", "hi");
    rig.say("u1", "3");
    std::vector<std::thread> threads;
    for (int i = 0; i < 8; ++i)
        threads.emplace_back([&rig, i] {
            InboundEvent e;
            e.sender_id = "u1";
            e.message_text = "4";
            e.timestamp = 9000 + i;
            EXPECT_EQ(rig.gateway.handle_event(e, Channel::loopback), EventOutcome::processed);
        });
    for (auto& t : threads) t.join();
    rig.sender.wait_idle();

    const auto r = rig.storage.find_latest("u1");
    for (int i = 0; i < 8; ++i) EXPECT_EQ(r->tipi[i], 4) << i;
    const auto messages = rig.loopback.messages_after("u1", 0);
    for (std::size_t i = 0; i < messages.size(); ++i) EXPECT_EQ(messages[i].seq, i + 1);
}

TEST(Gateway, ParallelUsersDoNotInterfere) {
    Rig rig;
    std::vector<std::thread> threads;
    for (int u = 0; u < 5; ++u)
        threads.emplace_back([&rig, u] { complete_survey(rig, "p" + std::to_string(u), u % 2 ? "2" : "3", u % 2); });
    for (auto& t : threads) t.join();
    rig.sender.wait_idle();
    for (int u = 0; u < 5; ++u) {
        const std::string user = "p" + std::to_string(u);
        const auto r = rig.storage.find_latest(user);
        ASSERT_TRUE(r);
        EXPECT_TRUE(r->finalized) << user;
        const auto messages = rig.loopback.messages_after(user, 0);
        for (std::size_t i = 0; i < messages.size(); ++i) ASSERT_EQ(messages[i].seq, i + 1) << user;
    }
}

TEST(KeyedFifoLock, ServesWaitersInArrivalOrder) {
    KeyedFifoLock lock;
    std::vector<int> order;
    std::mutex order_mutex;
    std::optional<KeyedFifoLock::Guard> held;
    held.emplace(lock, "k");
    std::vector<std::thread> threads;
    for (int i = 0; i < 4; ++i) {
        threads.emplace_back([&, i] {
            auto g = lock.acquire("k");
            std::lock_guard l(order_mutex);
            order.push_back(i);
        });
        std::this_thread::sleep_for(20ms);  // let thread i take its ticket first
    }
    held.reset();
    for (auto& t : threads) t.join();
    EXPECT_EQ(order, (std::vector<int>{0, 1, 2, 3}));
}
