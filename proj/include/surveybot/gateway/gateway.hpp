#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "surveybot/flow/engine.hpp"
#include "surveybot/gateway/profile.hpp"
#include "surveybot/gateway/protocol.hpp"
#include "surveybot/gateway/sender.hpp"
#include "surveybot/gateway/transport.hpp"
#include "surveybot/persistence/storage.hpp"

namespace surveybot::gateway {

enum class Channel { messenger, loopback };

enum class EventOutcome { processed, duplicate, rejected, storage_error };

std::string_view to_string(EventOutcome o);

struct TranscriptEntry {
    enum class Direction { inbound, outbound } direction = Direction::inbound;
    std::uint64_t seq = 0;  // outbound only
    std::string text;
    std::int64_t at = 0;  // unix ms
};

/// Serializes work per key in arrival order.
class KeyedFifoLock {
public:
    class Guard {
    public:
        Guard(KeyedFifoLock& owner, std::string key);
        ~Guard();
        Guard(const Guard&) = delete;
        Guard& operator=(const Guard&) = delete;

    private:
        KeyedFifoLock& owner_;
        std::string key_;
    };

    Guard acquire(const std::string& key) { return Guard(*this, key); }

private:
    struct Slot {
        std::uint64_t next_ticket = 0;
        std::uint64_t serving = 0;
    };
    std::mutex mutex_;
    std::condition_variable turn_;
    std::map<std::string, Slot> slots_;
};

struct GatewayOptions {
    std::chrono::milliseconds dedupe_window{std::chrono::minutes(10)};
};

/// Turns inbound events into engine steps: session lookup or creation,
/// engine dispatch, persistence of effects, and hand-off of the reply batch
/// to the ordered sender.
class Gateway {
public:
    Gateway(std::shared_ptr<const flow::FlowEngine> engine, persistence::Storage& storage, ProfileProvider& profiles,
            OrderedSender& sender, Transport& messenger, Transport& loopback, GatewayOptions options = {},
            persistence::Clock clock = persistence::system_clock());

    EventOutcome handle_event(const InboundEvent& event, Channel channel);

    /// Operator view of a session, in event order.
    std::vector<TranscriptEntry> transcript(const std::string& session_id) const;

    /// Session id of the user's latest session.
    std::optional<std::string> session_for_user(const std::string& user_id);
    bool finalized(const std::string& user_id);

    const flow::FlowEngine& engine() const { return *engine_; }

private:
    bool remember_event(const std::string& key);
    void forget_event(const std::string& key);

    std::shared_ptr<const flow::FlowEngine> engine_;
    persistence::Storage& storage_;
    ProfileProvider& profiles_;
    OrderedSender& sender_;
    Transport& messenger_;
    Transport& loopback_;
    GatewayOptions options_;
    persistence::Clock clock_;

    KeyedFifoLock user_locks_;

    std::mutex dedupe_mutex_;
    std::map<std::string, std::int64_t> seen_events_;

    mutable std::mutex transcript_mutex_;
    std::map<std::string, std::vector<TranscriptEntry>> transcripts_;
};

}  // namespace surveybot::gateway
