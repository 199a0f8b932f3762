#include "surveybot/gateway/sender.hpp"

#include <spdlog/spdlog.h>

namespace surveybot::gateway {

DeliveryReport send_with_retry(Transport& transport, const flow::OutboundMessage& message,
                               const SenderOptions& options) {
    DeliveryReport report;
    auto backoff = options.backoff;
    for (int attempt = 0;; ++attempt) {
        try {
            transport.send(message);
            report.delivered = 1;
            return report;
        } catch (const std::exception& e) {
            report.error = e.what();
            if (attempt >= options.max_retries) break;
            spdlog::warn("send seq {} to {} failed (attempt {}): {}", message.seq, message.recipient_id, attempt + 1,
                         e.what());
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
    }
    report.failed = true;
    return report;
}

OrderedSender::OrderedSender(SenderOptions options) : options_(options) {
    const std::size_t n = options_.threads == 0 ? 1 : options_.threads;
    for (std::size_t i = 0; i < n; ++i) workers_.emplace_back([this] { work(); });
}

OrderedSender::~OrderedSender() {
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
    }
    wake_.notify_all();
    for (auto& t : workers_) t.join();
}

void OrderedSender::schedule(const std::string& key, Strand& strand) {
    auto at = Clock::now();
    if (strand.sent_any && strand.last_sent + options_.delay > at) at = strand.last_sent + options_.delay;
    strand.scheduled = true;
    timers_.emplace(at, key);
    wake_.notify_one();
}

void OrderedSender::enqueue(const std::string& session_key, Transport& transport,
                            std::vector<flow::OutboundMessage> batch) {
    std::lock_guard lock(mutex_);
    auto& strand = strands_[session_key];
    for (auto& m : batch) strand.queue.push_back({&transport, std::move(m)});
    if (!strand.scheduled && !strand.stalled && !strand.queue.empty()) schedule(session_key, strand);
}

void OrderedSender::work() {
    std::unique_lock lock(mutex_);
    while (true) {
        if (stopping_ && timers_.empty()) return;
        if (timers_.empty()) {
            wake_.wait(lock);
            continue;
        }
        const auto due = timers_.begin()->first;
        if (due > Clock::now()) {
            wake_.wait_until(lock, due);
            continue;
        }
        const std::string key = timers_.begin()->second;
        timers_.erase(timers_.begin());
        Strand& strand = strands_[key];
        Item item = strand.queue.front();
        ++busy_;
        lock.unlock();

        const DeliveryReport report = send_with_retry(*item.transport, item.message, options_);

        lock.lock();
        --busy_;
        if (report.failed) {
            strand.stalled = true;
            strand.scheduled = false;
            spdlog::error("session {} stalled at seq {}: {}", key, item.message.seq, report.error);
        } else {
            strand.queue.pop_front();
            strand.last_sent = Clock::now();
            strand.sent_any = true;
            strand.scheduled = false;
            if (!strand.queue.empty()) schedule(key, strand);
        }
        idle_.notify_all();
    }
}

void OrderedSender::wait_idle() {
    std::unique_lock lock(mutex_);
    idle_.wait(lock, [this] { return timers_.empty() && busy_ == 0; });
}

bool OrderedSender::stalled(const std::string& session_key) const {
    std::lock_guard lock(mutex_);
    auto it = strands_.find(session_key);
    return it != strands_.end() && it->second.stalled;
}

std::vector<std::string> OrderedSender::stalled_sessions() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [key, strand] : strands_)
        if (strand.stalled) out.push_back(key);
    return out;
}

std::size_t OrderedSender::pending(const std::string& session_key) const {
    std::lock_guard lock(mutex_);
    auto it = strands_.find(session_key);
    return it == strands_.end() ? 0 : it->second.queue.size();
}

void OrderedSender::resume(const std::string& session_key) {
    std::lock_guard lock(mutex_);
    auto it = strands_.find(session_key);
    if (it == strands_.end() || !it->second.stalled) return;
    it->second.stalled = false;
    if (!it->second.queue.empty()) schedule(session_key, it->second);
}

}  // namespace surveybot::gateway
