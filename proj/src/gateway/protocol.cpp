#include "surveybot/gateway/protocol.hpp"

#include <stdexcept>

namespace surveybot::gateway {

using nlohmann::json;

namespace {

std::optional<std::string> string_at(const json& j, const json::json_pointer& ptr) {
    if (!j.contains(ptr)) return std::nullopt;
    const auto& v = j.at(ptr);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    return std::nullopt;
}

}  // namespace

ParsedWebhook parse_webhook_body(std::string_view body) {
    json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded()) throw std::invalid_argument("body is not JSON");
    if (!doc.is_object() || doc.value("object", "") != "page") throw std::invalid_argument("not a page event");
    if (!doc.contains("entry") || !doc["entry"].is_array()) throw std::invalid_argument("missing entry list");

    ParsedWebhook out;
    for (const auto& entry : doc["entry"]) {
        if (!entry.is_object() || !entry.contains("messaging") || !entry["messaging"].is_array()) {
            out.skipped.push_back("entry without messaging list");
            continue;
        }
        for (const auto& item : entry["messaging"]) {
            InboundEvent e;
            const auto sender = string_at(item, "/sender/id"_json_pointer);
            if (!sender || sender->empty()) {
                out.skipped.push_back("messaging item without sender id");
                continue;
            }
            e.sender_id = *sender;
            e.recipient_page_id = string_at(item, "/recipient/id"_json_pointer).value_or("");
            if (item.contains("timestamp") && item["timestamp"].is_number_integer())
                e.timestamp = item["timestamp"].get<std::int64_t>();

            if (item.contains("message") && item["message"].is_object()) {
                const auto& m = item["message"];
                if (m.value("is_echo", false)) {
                    out.skipped.push_back("echo from " + e.sender_id);
                    continue;
                }
                e.message_text = m.value("text", "");
                e.quick_reply_payload = string_at(m, "/quick_reply/payload"_json_pointer);
            } else if (item.contains("postback") && item["postback"].is_object()) {
                e.quick_reply_payload = string_at(item, "/postback/payload"_json_pointer);
                e.message_text = item["postback"].value("title", "");
            } else {
                out.skipped.push_back("non-message event from " + e.sender_id);
                continue;
            }
            out.events.push_back(std::move(e));
        }
    }
    return out;
}

InboundEvent parse_local_message(const json& body) {
    if (!body.is_object()) throw std::invalid_argument("body must be an object");
    InboundEvent e;
    const auto sender = string_at(body, "/sender/id"_json_pointer);
    if (!sender || sender->empty()) throw std::invalid_argument("sender.id is required");
    e.sender_id = *sender;
    e.recipient_page_id = "local";
    if (!body.contains("message") || !body["message"].is_object()) throw std::invalid_argument("message is required");
    const auto& m = body["message"];
    if (m.contains("text") && !m["text"].is_string()) throw std::invalid_argument("message.text must be a string");
    e.message_text = m.value("text", "");
    e.quick_reply_payload = string_at(m, "/quick_reply/payload"_json_pointer);
    if (body.contains("timestamp") && body["timestamp"].is_number_integer())
        e.timestamp = body["timestamp"].get<std::int64_t>();
    return e;
}

json send_api_body(const flow::OutboundMessage& message) {
    json msg{{"text", message.text}};
    if (!message.quick_replies.empty()) {
        json replies = json::array();
        for (const auto& r : message.quick_replies)
            replies.push_back({{"content_type", "text"}, {"title", r.label}, {"payload", std::to_string(r.payload)}});
        msg["quick_replies"] = std::move(replies);
    }
    return json{{"recipient", {{"id", message.recipient_id}}}, {"messaging_type", "RESPONSE"}, {"message", msg}};
}

}  // namespace surveybot::gateway
