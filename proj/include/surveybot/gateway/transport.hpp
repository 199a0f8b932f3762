#pragma once

#include <chrono>
#include <condition_variable>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "surveybot/flow/types.hpp"

namespace surveybot::gateway {

class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Transport {
public:
    virtual ~Transport() = default;
    /// Delivers one message or throws TransportError.
    virtual void send(const flow::OutboundMessage& message) = 0;
};

struct Delivery {
    flow::OutboundMessage message;
    std::chrono::steady_clock::time_point at;
};

/// In-process channel: one mailbox per recipient, read by the local HTTP
/// endpoints. Also serves as the transport log in tests.
class LoopbackTransport : public Transport {
public:
    void send(const flow::OutboundMessage& message) override;

    /// Messages for `user` with seq > after, in delivery order.
    std::vector<flow::OutboundMessage> messages_after(const std::string& user, std::uint64_t after) const;

    /// Like messages_after, but blocks up to `timeout` for at least one message.
    std::vector<flow::OutboundMessage> wait_after(const std::string& user, std::uint64_t after,
                                                  std::chrono::milliseconds timeout) const;

    std::vector<Delivery> log(const std::string& user) const;
    std::vector<std::string> users() const;

private:
    mutable std::mutex mutex_;
    mutable std::condition_variable arrived_;
    std::map<std::string, std::vector<Delivery>> mailboxes_;
};

/// POST {base_url}/me/messages?access_token=... (Messenger Send API).
class GraphSendTransport : public Transport {
public:
    GraphSendTransport(std::string base_url, std::string page_token);
    void send(const flow::OutboundMessage& message) override;

private:
    std::string base_url_;
    std::string page_token_;
};

}  // namespace surveybot::gateway
