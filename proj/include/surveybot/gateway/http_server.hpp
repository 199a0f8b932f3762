#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "surveybot/gateway/gateway.hpp"

namespace httplib {
class Server;
}

namespace surveybot::gateway {

struct ServerConfig {
    std::string bind = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    std::filesystem::path flow_path = "config/flow.json";
    std::string storage_path = "surveybot.db";
    std::string verify_token;
    std::string app_secret;
    std::string page_token;
    std::string graph_base_url = "https://graph.facebook.com/v15.0";
    /// "graph" sends Messenger replies through the Send API; "loopback" keeps
    /// them in the local mailbox (offline runs and tests).
    std::string messenger_transport = "graph";
    /// Profiles from a fixture file instead of the Graph API.
    std::optional<std::filesystem::path> profile_fixture;
    std::optional<int> message_delay_ms;   // overrides the flow settings
    std::optional<double> intent_threshold;  // overrides the flow settings
    std::size_t sender_threads = 4;
    int send_retries = 3;
    int send_backoff_ms = 200;
    std::optional<std::filesystem::path> ui_dir;
};

/// Reads a JSON config; relative paths resolve against base_dir. Unknown
/// keys are rejected with std::invalid_argument.
ServerConfig server_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

/// Reads the file; relative paths resolve against its directory.
ServerConfig load_server_config(const std::filesystem::path& path);

/// SURVEYBOT_VERIFY_TOKEN, SURVEYBOT_APP_SECRET, SURVEYBOT_PAGE_TOKEN,
/// SURVEYBOT_MESSAGE_DELAY_MS and SURVEYBOT_INTENT_THRESHOLD override the file.
void apply_environment(ServerConfig& config);

/// The whole service: storage, engine, gateway, sender and the HTTP routes.
class Server {
public:
    explicit Server(ServerConfig config);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds and serves on a background thread. Throws if the bind fails.
    void start();
    /// Binds and serves on the calling thread until stop().
    void run();
    void stop();

    int port() const { return port_; }
    std::string base_url() const;

    Gateway& gateway() { return *gateway_; }
    LoopbackTransport& loopback() { return *loopback_; }
    persistence::Storage& storage() { return *storage_; }
    OrderedSender& sender() { return *sender_; }
    const ServerConfig& config() const { return config_; }

private:
    void bind();
    void routes();

    ServerConfig config_;
    std::unique_ptr<persistence::Storage> storage_;
    std::unique_ptr<ProfileProvider> profiles_;
    std::unique_ptr<LoopbackTransport> loopback_;
    std::unique_ptr<Transport> messenger_;
    std::unique_ptr<OrderedSender> sender_;
    std::unique_ptr<Gateway> gateway_;
    std::unique_ptr<httplib::Server> http_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<std::int64_t> last_local_timestamp_{0};
};

}  // namespace surveybot::gateway
