#include <gtest/gtest.h>

#include <mutex>

#include "surveybot/gateway/sender.hpp"
#include "surveybot/gateway/transport.hpp"

using namespace surveybot;
using namespace surveybot::gateway;
using namespace std::chrono_literals;

namespace {

/// Records every attempt; fails the first `failures` attempts for chosen seqs.
class ScriptedTransport : public Transport {
public:
    void send(const flow::OutboundMessage& m) override {
        std::lock_guard lock(mutex_);
        attempts_.push_back(m);
        auto it = failures_.find({m.recipient_id, m.seq});
        if (it != failures_.end() && it->second > 0) {
            --it->second;
            throw TransportError("scripted failure");
        }
        delivered_.push_back({m, std::chrono::steady_clock::now()});
    }
    void fail(const std::string& user, std::uint64_t seq, int times) {
        std::lock_guard lock(mutex_);
        failures_[{user, seq}] = times;
    }
    std::vector<Delivery> delivered(const std::string& user) const {
        std::lock_guard lock(mutex_);
        std::vector<Delivery> out;
        for (const auto& d : delivered_)
            if (d.message.recipient_id == user) out.push_back(d);
        return out;
    }
    std::size_t attempts() const {
        std::lock_guard lock(mutex_);
        return attempts_.size();
    }

private:
    mutable std::mutex mutex_;
    std::vector<flow::OutboundMessage> attempts_;
    std::vector<Delivery> delivered_;
    std::map<std::pair<std::string, std::uint64_t>, int> failures_;
};

std::vector<flow::OutboundMessage> batch(const std::string& user, std::uint64_t first, std::uint64_t last) {
    std::vector<flow::OutboundMessage> out;
    for (auto s = first; s <= last; ++s) {
        flow::OutboundMessage m;
        m.recipient_id = user;
        m.seq = s;
        m.text = "m" + std::to_string(s);
        out.push_back(m);
    }
    return out;
}

std::vector<std::uint64_t> seqs(const std::vector<Delivery>& ds) {
    std::vector<std::uint64_t> out;
    for (const auto& d : ds) out.push_back(d.message.seq);
    return out;
}

SenderOptions fast(std::chrono::milliseconds delay = 0ms) {
    SenderOptions o;
    o.threads = 4;
    o.delay = delay;
    o.max_retries = 3;
    o.backoff = 1ms;
    return o;
}

}  // namespace

TEST(SendWithRetry, RetriesThenReports) {
    ScriptedTransport t;
    t.fail("u", 1, 2);
    const auto ok = send_with_retry(t, batch("u", 1, 1)[0], fast());
    EXPECT_EQ(ok.delivered, 1u);
    EXPECT_FALSE(ok.failed);
    EXPECT_EQ(t.attempts(), 3u);

    t.fail("u", 2, 10);
    const auto bad = send_with_retry(t, batch("u", 2, 2)[0], fast());
    EXPECT_TRUE(bad.failed);
    EXPECT_EQ(bad.error, "scripted failure");
    EXPECT_EQ(t.attempts(), 3u + 4u);  // first attempt plus three retries
}

TEST(OrderedSender, KeepsPerSessionOrderAcrossBatchesAndThreads) {
    ScriptedTransport t;
    {
        OrderedSender sender(fast());
        for (int u = 0; u < 8; ++u) {
            const std::string user = "u" + std::to_string(u);
            sender.enqueue(user, t, batch(user, 1, 5));
            sender.enqueue(user, t, batch(user, 6, 9));
        }
        sender.wait_idle();
    }
    for (int u = 0; u < 8; ++u) {
        const auto got = seqs(t.delivered("u" + std::to_string(u)));
        ASSERT_EQ(got.size(), 9u);
        for (std::size_t i = 0; i < got.size(); ++i) EXPECT_EQ(got[i], i + 1);
    }
}

TEST(OrderedSender, EnforcesMinimumGapPerSessionOnly) {
    ScriptedTransport t;
    OrderedSender sender(fast(40ms));
    const auto start = std::chrono::steady_clock::now();
    sender.enqueue("a", t, batch("a", 1, 4));
    sender.enqueue("b", t, batch("b", 1, 4));
    sender.wait_idle();
    const auto elapsed = std::chrono::steady_clock::now() - start;
    for (const char* user : {"a", "b"}) {
        const auto ds = t.delivered(user);
        ASSERT_EQ(ds.size(), 4u);
        for (std::size_t i = 1; i < ds.size(); ++i) EXPECT_GE(ds[i].at - ds[i - 1].at, 40ms) << user;
    }
    // The two sessions are paced in parallel, not one after the other.
    EXPECT_LT(elapsed, 6 * 40ms);
}

TEST(OrderedSender, FailureStallsSessionWithoutOvertaking) {
    ScriptedTransport t;
    t.fail("a", 2, 100);
    OrderedSender sender(fast());
    sender.enqueue("a", t, batch("a", 1, 4));
    sender.enqueue("b", t, batch("b", 1, 3));
    sender.wait_idle();

    EXPECT_EQ(seqs(t.delivered("a")), std::vector<std::uint64_t>{1});
    EXPECT_EQ(seqs(t.delivered("b")), (std::vector<std::uint64_t>{1, 2, 3}));
    EXPECT_TRUE(sender.stalled("a"));
    EXPECT_FALSE(sender.stalled("b"));
    EXPECT_EQ(sender.stalled_sessions(), std::vector<std::string>{"a"});
    EXPECT_EQ(sender.pending("a"), 3u);

    // Later batches queue behind the stalled message.
    sender.enqueue("a", t, batch("a", 5, 5));
    sender.wait_idle();
    EXPECT_EQ(t.delivered("a").size(), 1u);

    t.fail("a", 2, 0);
    sender.resume("a");
    sender.wait_idle();
    EXPECT_EQ(seqs(t.delivered("a")), (std::vector<std::uint64_t>{1, 2, 3, 4, 5}));
    EXPECT_FALSE(sender.stalled("a"));
    EXPECT_EQ(sender.pending("a"), 0u);
}

TEST(OrderedSender, DestructorDrainsQueuedMessages) {
    ScriptedTransport t;
    {
        OrderedSender sender(fast(5ms));
        sender.enqueue("a", t, batch("a", 1, 6));
    }
    EXPECT_EQ(t.delivered("a").size(), 6u);
}
