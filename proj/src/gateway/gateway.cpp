#include "surveybot/gateway/gateway.hpp"

#include <spdlog/spdlog.h>

#include <type_traits>

#include "surveybot/localization/text.hpp"

namespace surveybot::gateway {

std::string_view to_string(EventOutcome o) {
    switch (o) {
        case EventOutcome::processed: return "processed";
        case EventOutcome::duplicate: return "duplicate";
        case EventOutcome::rejected: return "rejected";
        case EventOutcome::storage_error: return "storage_error";
    }
    return "?";
}

KeyedFifoLock::Guard::Guard(KeyedFifoLock& owner, std::string key) : owner_(owner), key_(std::move(key)) {
    std::unique_lock lock(owner_.mutex_);
    auto& slot = owner_.slots_[key_];
    const std::uint64_t ticket = slot.next_ticket++;
    owner_.turn_.wait(lock, [&] { return owner_.slots_[key_].serving == ticket; });
}

KeyedFifoLock::Guard::~Guard() {
    {
        std::lock_guard lock(owner_.mutex_);
        auto it = owner_.slots_.find(key_);
        if (++it->second.serving == it->second.next_ticket) owner_.slots_.erase(it);
    }
    owner_.turn_.notify_all();
}

Gateway::Gateway(std::shared_ptr<const flow::FlowEngine> engine, persistence::Storage& storage,
                 ProfileProvider& profiles, OrderedSender& sender, Transport& messenger, Transport& loopback,
                 GatewayOptions options, persistence::Clock clock)
    : engine_(std::move(engine)),
      storage_(storage),
      profiles_(profiles),
      sender_(sender),
      messenger_(messenger),
      loopback_(loopback),
      options_(options),
      clock_(std::move(clock)) {}

bool Gateway::remember_event(const std::string& key) {
    std::lock_guard lock(dedupe_mutex_);
    const auto now = clock_();
    const auto window = options_.dedupe_window.count();
    for (auto it = seen_events_.begin(); it != seen_events_.end();)
        it = now - it->second > window ? seen_events_.erase(it) : std::next(it);
    return seen_events_.emplace(key, now).second;
}

void Gateway::forget_event(const std::string& key) {
    std::lock_guard lock(dedupe_mutex_);
    seen_events_.erase(key);
}

EventOutcome Gateway::handle_event(const InboundEvent& event, Channel channel) {
    if (event.sender_id.empty()) {
        spdlog::warn("dropping event without sender id");
        return EventOutcome::rejected;
    }
    const std::string& text = event.answer_text();
    if (text::trim(text).empty()) {
        spdlog::info("dropping empty message from {}", event.sender_id);
        return EventOutcome::rejected;
    }
    const std::string dedupe_key = event.sender_id + '\x1f' + std::to_string(event.timestamp) + '\x1f' +
                                   event.message_text + '\x1f' + event.quick_reply_payload.value_or("");
    if (!remember_event(dedupe_key)) {
        spdlog::info("duplicate event from {} at {}", event.sender_id, event.timestamp);
        return EventOutcome::duplicate;
    }

    auto guard = user_locks_.acquire(event.sender_id);
    try {
        const auto latest = storage_.find_latest(event.sender_id);
        std::optional<flow::Session> session;
        if (latest) session = storage_.load_session(std::to_string(latest->id));
        const bool first_contact = !latest;
        const auto profile = first_contact ? fetch_profile(profiles_, event.sender_id) : ProfileAttributes{};
        const auto now = clock_();

        flow::StepResult step;
        storage_.run_atomically([&] {
            std::int64_t record_id = 0;
            if (first_contact) {
                record_id = storage_.create_record(event.sender_id, profile).id;
            } else {
                record_id = latest->id;
            }
            if (!session) {
                session = engine_->new_session(std::to_string(record_id), event.sender_id);
                session->created_at = now;
            }
            step = engine_->advance(*session, text);
            step.session.updated_at = now;

            for (const auto& effect : step.effects) {
                std::visit(
                    [&](const auto& e) {
                        using E = std::decay_t<decltype(e)>;
                        if constexpr (std::is_same_v<E, flow::AnswerRecorded>)
                            storage_.save_answer(record_id, e.question_id, e.value);
                        else if constexpr (std::is_same_v<E, flow::LocaleSelected>)
                            storage_.set_language(record_id, e.locale);
                        else if constexpr (std::is_same_v<E, flow::TipiScored>)
                            storage_.save_scores(record_id, e.profile);
                        else
                            storage_.mark_finalized(record_id);
                    },
                    effect);
            }
            storage_.save_session(step.session);
        });

        {
            std::lock_guard lock(transcript_mutex_);
            auto& log = transcripts_[step.session.session_id];
            log.push_back({TranscriptEntry::Direction::inbound, 0, text, now});
            for (const auto& m : step.messages)
                log.push_back({TranscriptEntry::Direction::outbound, m.seq, m.text, now});
        }
        sender_.enqueue(step.session.session_id, channel == Channel::messenger ? messenger_ : loopback_,
                        std::move(step.messages));
        return EventOutcome::processed;
    } catch (const persistence::StorageError& e) {
        spdlog::error("storage failure for {}: {}", event.sender_id, e.what());
        forget_event(dedupe_key);
        return EventOutcome::storage_error;
    }
}

std::vector<TranscriptEntry> Gateway::transcript(const std::string& session_id) const {
    std::lock_guard lock(transcript_mutex_);
    auto it = transcripts_.find(session_id);
    return it == transcripts_.end() ? std::vector<TranscriptEntry>{} : it->second;
}

std::optional<std::string> Gateway::session_for_user(const std::string& user_id) {
    const auto latest = storage_.find_latest(user_id);
    if (!latest) return std::nullopt;
    return std::to_string(latest->id);
}

bool Gateway::finalized(const std::string& user_id) {
    const auto latest = storage_.find_latest(user_id);
    return latest && latest->finalized;
}

}  // namespace surveybot::gateway
