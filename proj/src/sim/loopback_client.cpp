#include "surveybot/sim/loopback_client.hpp"

#include <httplib.h>

#include <nlohmann/json.hpp>

namespace surveybot::sim {

using nlohmann::json;

LoopbackClient::LoopbackClient(std::string base_url) : base_url_(std::move(base_url)) {
    while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

void LoopbackClient::post(const std::string& body) {
    httplib::Client client(base_url_);
    client.set_read_timeout(30);
    auto res = client.Post("/local/messages", body, "application/json");
    if (!res) throw ClientError("cannot reach " + base_url_ + ": " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw ClientError("POST /local/messages returned " + std::to_string(res->status) + ": " + res->body);
}

void LoopbackClient::send_text(const std::string& user, const std::string& text) {
    post(json{{"sender", {{"id", user}}}, {"message", {{"text", text}}}}.dump());
}

void LoopbackClient::send_quick_reply(const std::string& user, const std::string& title, const std::string& payload) {
    post(json{{"sender", {{"id", user}}}, {"message", {{"text", title}, {"quick_reply", {{"payload", payload}}}}}}
             .dump());
}

PollResult LoopbackClient::poll(const std::string& user, std::uint64_t after, std::chrono::milliseconds wait) {
    httplib::Client client(base_url_);
    client.set_read_timeout(std::chrono::seconds(5) + wait);
    httplib::Params params{{"user", user}, {"after", std::to_string(after)}, {"wait", std::to_string(wait.count())}};
    auto res = client.Get("/local/messages", params, httplib::Headers{});
    if (!res) throw ClientError("cannot reach " + base_url_ + ": " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw ClientError("GET /local/messages returned " + std::to_string(res->status) + ": " + res->body);

    const json doc = json::parse(res->body);
    PollResult out;
    out.finalized = doc.value("finalized", false);
    for (const auto& m : doc.at("messages")) {
        ReceivedMessage r;
        r.seq = m.at("seq").get<std::uint64_t>();
        r.text = m.at("message").at("text").get<std::string>();
        r.question = m.value("kind", "") == "question";
        r.last_in_batch = m.value("last_in_batch", false);
        if (m["message"].contains("quick_replies"))
            for (const auto& q : m["message"]["quick_replies"])
                r.quick_replies.emplace_back(q.at("title").get<std::string>(), q.at("payload").get<std::string>());
        out.messages.push_back(std::move(r));
    }
    return out;
}

}  // namespace surveybot::sim
