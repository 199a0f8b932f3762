#include "surveybot/gateway/http_server.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <set>

#include "surveybot/flow/config.hpp"
#include "surveybot/flow/session_json.hpp"
#include "surveybot/gateway/signature.hpp"

namespace surveybot::gateway {

using nlohmann::json;

namespace {

constexpr int kMaxWaitMs = 30000;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

void reply_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

std::int64_t now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
        .count();
}

}  // namespace

ServerConfig server_config_from_json(const json& j, const std::filesystem::path& base_dir) {
    static const std::set<std::string> known = {
        "bind",          "port",           "flow",          "storage",          "verify_token",
        "app_secret",    "page_token",     "graph_base_url", "messenger_transport", "profile_fixture",
        "message_delay_ms", "intent_threshold", "sender_threads", "send_retries", "send_backoff_ms",
        "ui_dir"};
    if (!j.is_object()) throw std::invalid_argument("server config must be a JSON object");
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw std::invalid_argument("unknown server config key: " + key);

    ServerConfig c;
    c.bind = j.value("bind", c.bind);
    c.port = j.value("port", c.port);
    if (j.contains("flow")) c.flow_path = resolve(base_dir, j["flow"].get<std::string>());
    if (j.contains("storage")) {
        const auto s = j["storage"].get<std::string>();
        c.storage_path = s == ":memory:" ? s : resolve(base_dir, s).string();
    }
    c.verify_token = j.value("verify_token", c.verify_token);
    c.app_secret = j.value("app_secret", c.app_secret);
    c.page_token = j.value("page_token", c.page_token);
    c.graph_base_url = j.value("graph_base_url", c.graph_base_url);
    c.messenger_transport = j.value("messenger_transport", c.messenger_transport);
    if (c.messenger_transport != "graph" && c.messenger_transport != "loopback")
        throw std::invalid_argument("messenger_transport must be \"graph\" or \"loopback\"");
    if (j.contains("profile_fixture")) c.profile_fixture = resolve(base_dir, j["profile_fixture"].get<std::string>());
    if (j.contains("message_delay_ms")) c.message_delay_ms = j["message_delay_ms"].get<int>();
    if (j.contains("intent_threshold")) c.intent_threshold = j["intent_threshold"].get<double>();
    c.sender_threads = j.value("sender_threads", c.sender_threads);
    c.send_retries = j.value("send_retries", c.send_retries);
    c.send_backoff_ms = j.value("send_backoff_ms", c.send_backoff_ms);
    if (j.contains("ui_dir")) c.ui_dir = resolve(base_dir, j["ui_dir"].get<std::string>());
    return c;
}

ServerConfig load_server_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
    return server_config_from_json(doc, std::filesystem::absolute(path).parent_path());
}

void apply_environment(ServerConfig& c) {
    auto env = [](const char* name) -> std::optional<std::string> {
        const char* v = std::getenv(name);
        if (!v || !*v) return std::nullopt;
        return std::string(v);
    };
    if (auto v = env("SURVEYBOT_VERIFY_TOKEN")) c.verify_token = *v;
    if (auto v = env("SURVEYBOT_APP_SECRET")) c.app_secret = *v;
    if (auto v = env("SURVEYBOT_PAGE_TOKEN")) c.page_token = *v;
    if (auto v = env("SURVEYBOT_MESSAGE_DELAY_MS")) c.message_delay_ms = std::stoi(*v);
    if (auto v = env("SURVEYBOT_INTENT_THRESHOLD")) c.intent_threshold = std::stod(*v);
}

Server::Server(ServerConfig config) : config_(std::move(config)) {
    auto flow = flow::load_flow_file(config_.flow_path);
    if (config_.message_delay_ms) {
        if (*config_.message_delay_ms < 0) throw std::invalid_argument("message_delay_ms must be >= 0");
        flow.settings.message_delay = std::chrono::milliseconds(*config_.message_delay_ms);
    }
    if (config_.intent_threshold) {
        if (*config_.intent_threshold < 0.0 || *config_.intent_threshold > 1.0)
            throw std::invalid_argument("intent_threshold must lie in [0, 1]");
        flow.settings.intent_threshold = *config_.intent_threshold;
    }
    const auto delay = flow.settings.message_delay;
    auto engine = std::make_shared<const flow::FlowEngine>(std::make_shared<const flow::FlowDefinition>(std::move(flow)));

    storage_ = std::make_unique<persistence::SqliteStorage>(config_.storage_path);
    if (config_.profile_fixture)
        profiles_ = std::make_unique<FixtureProfileProvider>(FixtureProfileProvider::from_file(*config_.profile_fixture));
    else
        profiles_ = std::make_unique<GraphProfileProvider>(config_.graph_base_url, config_.page_token);
    loopback_ = std::make_unique<LoopbackTransport>();
    if (config_.messenger_transport == "graph")
        messenger_ = std::make_unique<GraphSendTransport>(config_.graph_base_url, config_.page_token);

    SenderOptions so;
    so.threads = config_.sender_threads;
    so.delay = delay;
    so.max_retries = config_.send_retries;
    so.backoff = std::chrono::milliseconds(config_.send_backoff_ms);
    sender_ = std::make_unique<OrderedSender>(so);
    gateway_ = std::make_unique<Gateway>(engine, *storage_, *profiles_, *sender_,
                                         messenger_ ? *messenger_ : static_cast<Transport&>(*loopback_), *loopback_);
    http_ = std::make_unique<httplib::Server>();
    routes();
}

Server::~Server() {
    stop();
    // The sender drains before the transports it points at go away.
    sender_.reset();
}

std::string Server::base_url() const { return "http://" + config_.bind + ":" + std::to_string(port_); }

void Server::bind() {
    if (config_.port == 0) {
        port_ = http_->bind_to_any_port(config_.bind);
        if (port_ < 0) throw std::runtime_error("cannot bind " + config_.bind);
    } else {
        if (!http_->bind_to_port(config_.bind, config_.port))
            throw std::runtime_error("cannot bind " + config_.bind + ":" + std::to_string(config_.port));
        port_ = config_.port;
    }
    spdlog::info("listening on {}", base_url());
}

void Server::start() {
    bind();
    thread_ = std::thread([this] { http_->listen_after_bind(); });
    http_->wait_until_ready();
}

void Server::run() {
    bind();
    http_->listen_after_bind();
}

void Server::stop() {
    if (http_) http_->stop();
    if (thread_.joinable()) thread_.join();
}

void Server::routes() {
    auto& s = *http_;

    s.Get("/health", [](const httplib::Request&, httplib::Response& res) { reply_json(res, 200, {{"status", "ok"}}); });

    s.Get("/webhook", [this](const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> query;
        for (const auto& [k, v] : req.params) query.emplace(k, v);
        if (auto challenge = verify_subscription(query, config_.verify_token)) {
            res.status = 200;
            res.set_content(*challenge, "text/plain");
        } else {
            spdlog::warn("webhook subscription rejected");
            res.status = 403;
        }
    });

    s.Post("/webhook", [this](const httplib::Request& req, httplib::Response& res) {
        const auto check = config_.app_secret.empty()
                               ? SignatureCheck::mismatch
                               : verify_signature(req.body, req.get_header_value("X-Hub-Signature"), config_.app_secret);
        if (check != SignatureCheck::accept) {
            spdlog::warn("webhook event rejected: {}", to_string(check));
            res.status = 403;
            return;
        }
        ParsedWebhook parsed;
        try {
            parsed = parse_webhook_body(req.body);
        } catch (const std::exception& e) {
            spdlog::warn("webhook body rejected: {}", e.what());
            res.status = 400;
            return;
        }
        for (const auto& reason : parsed.skipped) spdlog::info("webhook item skipped: {}", reason);
        bool failed = false;
        for (const auto& event : parsed.events)
            if (gateway_->handle_event(event, Channel::messenger) == EventOutcome::storage_error) failed = true;
        res.status = failed ? 500 : 200;
        res.set_content(failed ? "STORAGE_ERROR" : "EVENT_RECEIVED", "text/plain");
    });

    s.Get(R"(/sessions/([^/]+)/transcript)", [this](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        const auto session = storage_->load_session(id);
        if (!session) {
            reply_json(res, 404, {{"error", "unknown session"}});
            return;
        }
        json entries = json::array();
        for (const auto& e : gateway_->transcript(id)) {
            json item{{"direction", e.direction == TranscriptEntry::Direction::inbound ? "inbound" : "outbound"},
                      {"text", e.text},
                      {"at", e.at}};
            if (e.direction == TranscriptEntry::Direction::outbound) item["seq"] = e.seq;
            entries.push_back(std::move(item));
        }
        reply_json(res, 200,
                   {{"session_id", id},
                    {"user_id", session->external_user_id},
                    {"finalized", session->finalized},
                    {"entries", entries}});
    });

    s.Post("/local/messages", [this](const httplib::Request& req, httplib::Response& res) {
        InboundEvent event;
        try {
            event = parse_local_message(json::parse(req.body));
        } catch (const std::exception& e) {
            reply_json(res, 400, {{"error", e.what()}});
            return;
        }
        if (event.timestamp == 0) {
            // Unique per process so identical consecutive answers are not deduplicated.
            std::int64_t prev = last_local_timestamp_.load();
            std::int64_t next;
            do {
                next = std::max(now_ms(), prev + 1);
            } while (!last_local_timestamp_.compare_exchange_weak(prev, next));
            event.timestamp = next;
        }
        const auto outcome = gateway_->handle_event(event, Channel::loopback);
        const int status = outcome == EventOutcome::storage_error ? 500 : outcome == EventOutcome::rejected ? 400 : 200;
        reply_json(res, status, {{"outcome", std::string(to_string(outcome))}});
    });

    s.Get("/local/messages", [this](const httplib::Request& req, httplib::Response& res) {
        const std::string user = req.get_param_value("user");
        if (user.empty()) {
            reply_json(res, 400, {{"error", "user is required"}});
            return;
        }
        std::uint64_t after = 0;
        int wait_ms = 0;
        try {
            if (req.has_param("after")) after = std::stoull(req.get_param_value("after"));
            if (req.has_param("wait")) wait_ms = std::clamp(std::stoi(req.get_param_value("wait")), 0, kMaxWaitMs);
        } catch (const std::exception&) {
            reply_json(res, 400, {{"error", "after and wait must be integers"}});
            return;
        }
        const auto messages = wait_ms > 0 ? loopback_->wait_after(user, after, std::chrono::milliseconds(wait_ms))
                                          : loopback_->messages_after(user, after);
        json list = json::array();
        for (const auto& m : messages) list.push_back(flow::message_to_json(m));
        reply_json(res, 200, {{"messages", list}, {"finalized", gateway_->finalized(user)}});
    });

    if (config_.ui_dir) {
        if (std::filesystem::is_directory(*config_.ui_dir))
            s.set_mount_point("/ui", config_.ui_dir->string());
        else
            spdlog::warn("ui_dir {} does not exist, /ui not mounted", config_.ui_dir->string());
    }

    s.set_exception_handler([](const httplib::Request& req, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "unknown error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            what = e.what();
        } catch (...) {
        }
        spdlog::error("{} {} failed: {}", req.method, req.path, what);
        reply_json(res, 500, {{"error", what}});
    });
}

}  // namespace surveybot::gateway
