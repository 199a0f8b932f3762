#include "surveybot/flow/session_json.hpp"

#include <stdexcept>

namespace surveybot::flow {

using nlohmann::json;

json session_to_json(const Session& s) {
    json j;
    j["session_id"] = s.session_id;
    j["external_user_id"] = s.external_user_id;
    j["locale"] = s.locale ? json(std::string(to_string(*s.locale))) : json(nullptr);
    j["cursor"] = {{"phase", s.cursor.phase}, {"question", s.cursor.question}};
    j["answers"] = s.answers;
    j["employed"] = std::string(to_string(s.employed));
    j["outbound_seq"] = s.outbound_seq;
    j["consecutive_failures"] = s.consecutive_failures;
    j["finalized"] = s.finalized;
    j["created_at"] = s.created_at;
    j["updated_at"] = s.updated_at;
    return j;
}

Session session_from_json(const json& j) {
    Session s;
    s.session_id = j.at("session_id").get<std::string>();
    s.external_user_id = j.at("external_user_id").get<std::string>();
    if (!j.at("locale").is_null()) {
        s.locale = parse_locale(j.at("locale").get<std::string>());
        if (!s.locale) throw std::invalid_argument("bad locale in stored session");
    }
    s.cursor.phase = j.at("cursor").at("phase").get<std::size_t>();
    s.cursor.question = j.at("cursor").at("question").get<std::size_t>();
    s.answers = j.at("answers").get<std::map<std::string, int>>();
    const auto employed = j.at("employed").get<std::string>();
    if (employed == "yes") s.employed = Employment::yes;
    else if (employed == "no") s.employed = Employment::no;
    else s.employed = Employment::unknown;
    s.outbound_seq = j.at("outbound_seq").get<std::uint64_t>();
    s.consecutive_failures = j.at("consecutive_failures").get<int>();
    s.finalized = j.at("finalized").get<bool>();
    s.created_at = j.at("created_at").get<std::int64_t>();
    s.updated_at = j.at("updated_at").get<std::int64_t>();
    return s;
}

json message_to_json(const OutboundMessage& m) {
    json msg{{"text", m.text}};
    if (!m.quick_replies.empty()) {
        json replies = json::array();
        for (const auto& r : m.quick_replies)
            replies.push_back({{"content_type", "text"}, {"title", r.label}, {"payload", std::to_string(r.payload)}});
        msg["quick_replies"] = std::move(replies);
    }
    return json{{"recipient", {{"id", m.recipient_id}}},
                {"seq", m.seq},
                {"kind", m.kind == MessageKind::question ? "question" : "statement"},
                {"last_in_batch", m.last_in_batch},
                {"message", std::move(msg)}};
}

}  // namespace surveybot::flow
