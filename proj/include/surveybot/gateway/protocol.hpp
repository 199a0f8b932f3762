#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "surveybot/flow/types.hpp"

namespace surveybot::gateway {

struct InboundEvent {
    std::string sender_id;
    std::string recipient_page_id;
    std::int64_t timestamp = 0;  // unix ms
    std::string message_text;
    std::optional<std::string> quick_reply_payload;

    /// The text handed to the engine: the quick-reply payload if present.
    const std::string& answer_text() const { return quick_reply_payload ? *quick_reply_payload : message_text; }
};

struct ParsedWebhook {
    std::vector<InboundEvent> events;
    /// Entries skipped, each with the reason (echoes, receipts, malformed items).
    std::vector<std::string> skipped;
};

/// Reads a Messenger page-subscription envelope. Throws std::invalid_argument
/// if the body is not JSON or not a page object.
ParsedWebhook parse_webhook_body(std::string_view body);

/// Reads a loopback POST body: {"sender":{"id"},"message":{"text","quick_reply":{"payload"}}}.
/// Throws std::invalid_argument on a malformed body.
InboundEvent parse_local_message(const nlohmann::json& body);

/// Send API request body for one outbound message.
nlohmann::json send_api_body(const flow::OutboundMessage& message);

}  // namespace surveybot::gateway
