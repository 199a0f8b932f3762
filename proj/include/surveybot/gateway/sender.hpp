#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "surveybot/gateway/transport.hpp"

namespace surveybot::gateway {

struct SenderOptions {
    std::size_t threads = 2;
    std::chrono::milliseconds delay{800};  // minimum gap between two sends to one session
    int max_retries = 3;
    std::chrono::milliseconds backoff{200};  // doubled after every failed attempt
};

struct DeliveryReport {
    std::size_t delivered = 0;
    bool failed = false;
    std::string error;
};

/// Sends one message, retrying up to `max_retries` times with exponential backoff.
DeliveryReport send_with_retry(Transport& transport, const flow::OutboundMessage& message, const SenderOptions& options);

/// Delivers queued messages per session in enqueue order. Sessions are
/// independent strands multiplexed over a small worker pool. A message that
/// still fails after its retries stalls its strand; nothing behind it is sent
/// until resume() is called.
class OrderedSender {
public:
    explicit OrderedSender(SenderOptions options);
    ~OrderedSender();
    OrderedSender(const OrderedSender&) = delete;
    OrderedSender& operator=(const OrderedSender&) = delete;

    void enqueue(const std::string& session_key, Transport& transport, std::vector<flow::OutboundMessage> batch);

    /// Blocks until every strand is empty or stalled.
    void wait_idle();

    bool stalled(const std::string& session_key) const;
    std::vector<std::string> stalled_sessions() const;
    std::size_t pending(const std::string& session_key) const;
    /// Clears the stall and retries the head message.
    void resume(const std::string& session_key);

private:
    using Clock = std::chrono::steady_clock;

    struct Item {
        Transport* transport;
        flow::OutboundMessage message;
    };
    struct Strand {
        std::deque<Item> queue;
        bool scheduled = false;
        bool stalled = false;
        Clock::time_point last_sent{};
        bool sent_any = false;
    };

    void schedule(const std::string& key, Strand& strand);
    void work();

    SenderOptions options_;
    mutable std::mutex mutex_;
    std::condition_variable wake_;
    std::condition_variable idle_;
    std::map<std::string, Strand> strands_;
    std::multimap<Clock::time_point, std::string> timers_;
    std::size_t busy_ = 0;
    bool stopping_ = false;
    std::vector<std::thread> workers_;
};

}  // namespace surveybot::gateway
