#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <csignal>
#include <iostream>

#include "surveybot/flow/config.hpp"
#include "surveybot/gateway/http_server.hpp"

namespace {

surveybot::gateway::Server* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Survey chatbot gateway: Messenger webhook, loopback channel and operator endpoints"};
    std::string config_path;
    std::string bind, storage, flow, fixture, ui_dir, log_level = "info";
    int port = -1, delay_ms = -1;
    double threshold = -1.0;
    bool check_only = false;
    app.add_option("-c,--config", config_path, "Server config (JSON)")->check(CLI::ExistingFile);
    app.add_option("--bind", bind, "Bind address");
    app.add_option("--port", port, "Port, 0 for any free port");
    app.add_option("--flow", flow, "Flow definition (JSON)")->check(CLI::ExistingFile);
    app.add_option("--storage", storage, "SQLite file, or :memory:");
    app.add_option("--profile-fixture", fixture, "Serve profiles from a fixture instead of the Graph API")
        ->check(CLI::ExistingFile);
    app.add_option("--delay-ms", delay_ms, "Inter-message delay in milliseconds");
    app.add_option("--intent-threshold", threshold, "Intent match threshold in [0, 1]");
    app.add_option("--ui-dir", ui_dir, "Static chat UI bundle served at /ui");
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error"}));
    app.add_flag("--check-config", check_only, "Validate the flow definition and exit");
    CLI11_PARSE(app, argc, argv);

    spdlog::set_level(spdlog::level::from_str(log_level));
    try {
        surveybot::gateway::ServerConfig config;
        if (!config_path.empty()) config = surveybot::gateway::load_server_config(config_path);
        surveybot::gateway::apply_environment(config);
        if (!bind.empty()) config.bind = bind;
        if (port >= 0) config.port = port;
        if (!flow.empty()) config.flow_path = flow;
        if (!storage.empty()) config.storage_path = storage;
        if (!fixture.empty()) config.profile_fixture = fixture;
        if (delay_ms >= 0) config.message_delay_ms = delay_ms;
        if (threshold >= 0.0) config.intent_threshold = threshold;
        if (!ui_dir.empty()) config.ui_dir = ui_dir;

        if (check_only) {
            const auto def = surveybot::flow::load_flow_file(config.flow_path);
            std::cout << "OK: " << def.phases.size() << " phases\n";
            return 0;
        }

        surveybot::gateway::Server server(config);
        g_server = &server;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        server.run();
        g_server = nullptr;
    } catch (const surveybot::flow::ConfigError& e) {
        std::cerr << to_string(e.code()) << " at " << e.position() << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
