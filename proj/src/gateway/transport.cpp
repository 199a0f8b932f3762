#include "surveybot/gateway/transport.hpp"

#include <httplib.h>

#include "surveybot/gateway/profile.hpp"
#include "surveybot/gateway/protocol.hpp"

namespace surveybot::gateway {

void LoopbackTransport::send(const flow::OutboundMessage& message) {
    {
        std::lock_guard lock(mutex_);
        mailboxes_[message.recipient_id].push_back({message, std::chrono::steady_clock::now()});
    }
    arrived_.notify_all();
}

std::vector<flow::OutboundMessage> LoopbackTransport::messages_after(const std::string& user,
                                                                     std::uint64_t after) const {
    std::lock_guard lock(mutex_);
    std::vector<flow::OutboundMessage> out;
    auto it = mailboxes_.find(user);
    if (it == mailboxes_.end()) return out;
    for (const auto& d : it->second)
        if (d.message.seq > after) out.push_back(d.message);
    return out;
}

std::vector<flow::OutboundMessage> LoopbackTransport::wait_after(const std::string& user, std::uint64_t after,
                                                                 std::chrono::milliseconds timeout) const {
    std::unique_lock lock(mutex_);
    auto has_new = [&] {
        auto it = mailboxes_.find(user);
        return it != mailboxes_.end() && !it->second.empty() && it->second.back().message.seq > after;
    };
    arrived_.wait_for(lock, timeout, has_new);
    lock.unlock();
    return messages_after(user, after);
}

std::vector<Delivery> LoopbackTransport::log(const std::string& user) const {
    std::lock_guard lock(mutex_);
    auto it = mailboxes_.find(user);
    return it == mailboxes_.end() ? std::vector<Delivery>{} : it->second;
}

std::vector<std::string> LoopbackTransport::users() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [user, box] : mailboxes_) out.push_back(user);
    return out;
}

GraphSendTransport::GraphSendTransport(std::string base_url, std::string page_token)
    : base_url_(std::move(base_url)), page_token_(std::move(page_token)) {}

void GraphSendTransport::send(const flow::OutboundMessage& message) {
    const auto [host, prefix] = split_base_url(base_url_);
    httplib::Client client(host);
    client.set_connection_timeout(5);
    client.set_read_timeout(10);
    const std::string path = prefix + "/me/messages?access_token=" + httplib::detail::encode_query_param(page_token_);
    auto res = client.Post(path, send_api_body(message).dump(), "application/json");
    if (!res) throw TransportError("send failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw TransportError("send returned HTTP " + std::to_string(res->status) + ": " + res->body);
}

}  // namespace surveybot::gateway
