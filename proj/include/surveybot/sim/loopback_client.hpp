#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace surveybot::sim {

struct ReceivedMessage {
    std::uint64_t seq = 0;
    std::string text;
    bool question = false;
    bool last_in_batch = false;
    std::vector<std::pair<std::string, std::string>> quick_replies;  // title, payload
};

struct PollResult {
    std::vector<ReceivedMessage> messages;
    bool finalized = false;
};

class ClientError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Speaks the gateway's loopback endpoints over HTTP.
class LoopbackClient {
public:
    explicit LoopbackClient(std::string base_url);

    /// Throws ClientError on connection failure or a non-200 answer.
    void send_text(const std::string& user, const std::string& text);
    void send_quick_reply(const std::string& user, const std::string& title, const std::string& payload);

    /// Messages with seq > after; waits up to `wait` for the first one.
    PollResult poll(const std::string& user, std::uint64_t after, std::chrono::milliseconds wait);

    const std::string& base_url() const { return base_url_; }

private:
    void post(const std::string& body);

    std::string base_url_;
};

}  // namespace surveybot::sim
