#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>

#include "surveybot/gateway/http_server.hpp"
#include "surveybot/sim/runner.hpp"

namespace {

using namespace surveybot;

/// Either a remote gateway URL or a gateway started in this process.
struct Target {
    std::string url;
    std::string config;

    void add_to(CLI::App* cmd) {
        auto* u = cmd->add_option("--url", url, "Base URL of a running gateway");
        auto* c = cmd->add_option("--config", config, "Start an in-process gateway from this server config")
                      ->check(CLI::ExistingFile);
        u->excludes(c);
    }

    /// Returns the base URL, starting the in-process server if needed.
    std::string connect(std::unique_ptr<gateway::Server>& holder) const {
        if (!url.empty()) return url;
        if (config.empty()) throw std::invalid_argument("give --url or --config");
        auto cfg = gateway::load_server_config(config);
        cfg.port = 0;
        cfg.bind = "127.0.0.1";
        holder = std::make_unique<gateway::Server>(cfg);
        holder->start();
        return holder->base_url();
    }
};

int run(const std::string& script_path, const Target& target, int timeout_ms) {
    std::unique_ptr<gateway::Server> server;
    const auto script = sim::load_transcript(script_path);
    sim::LoopbackClient client(target.connect(server));
    sim::RunOptions options;
    options.timeout = std::chrono::milliseconds(timeout_ms);
    const auto result = sim::run_script(script, client, options);
    std::cout << script_path << ": " << result.summary() << "\n";
    return result.passed() ? 0 : 1;
}

int load(const std::string& script_path, const Target& target, int clients, int timeout_ms) {
    std::unique_ptr<gateway::Server> server;
    const auto script = sim::load_transcript(script_path);
    const std::string url = target.connect(server);
    sim::RunOptions options;
    options.timeout = std::chrono::milliseconds(timeout_ms);
    const auto results = sim::run_load(script, url, clients, options);
    bool ok = true;
    for (std::size_t i = 0; i < results.size(); ++i) {
        std::cout << "client " << i + 1 << ": " << results[i].summary() << "\n";
        ok = ok && results[i].passed();
    }
    return ok ? 0 : 1;
}

int record(const std::string& script_path, const Target& target, const std::string& out_path, int timeout_ms) {
    std::unique_ptr<gateway::Server> server;
    const auto script = sim::load_transcript(script_path);
    sim::LoopbackClient client(target.connect(server));
    sim::RunOptions options;
    options.timeout = std::chrono::milliseconds(timeout_ms);
    const std::string text = sim::record_script(script, client, options);
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
    } else {
        std::ofstream(out_path, std::ios::binary) << text;
    }
    return 0;
}

void print_batch(const std::vector<sim::ReceivedMessage>& messages) {
    for (const auto& m : messages) {
        std::cout << "[" << m.seq << "] " << m.text << "\n";
        if (!m.quick_replies.empty()) {
            std::cout << "    ";
            for (const auto& [title, payload] : m.quick_replies) std::cout << "(" << payload << ") " << title << "  ";
            std::cout << "\n";
        }
    }
    std::cout.flush();
}

int chat(const Target& target, const std::string& user, const std::string& locale_hint, int timeout_ms) {
    std::unique_ptr<gateway::Server> server;
    sim::LoopbackClient client(target.connect(server));
    std::uint64_t last = 0;
    auto drain = [&](bool wait_for_batch) {
        const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
        while (true) {
            const auto poll = client.poll(user, last, std::chrono::milliseconds(wait_for_batch ? 500 : 0));
            print_batch(poll.messages);
            bool closed = false;
            for (const auto& m : poll.messages) {
                last = m.seq;
                closed = closed || m.last_in_batch;
            }
            if (!wait_for_batch || closed || std::chrono::steady_clock::now() > deadline) return poll.finalized;
        }
    };
    drain(false);
    std::cout << "Chatting as " << user;
    if (!locale_hint.empty()) std::cout << " (locale hint " << locale_hint << ")";
    std::cout << ". Ctrl-D leaves; the session can be resumed later.\n";

    std::string line;
    while (std::cout << "> " << std::flush, std::getline(std::cin, line)) {
        if (line.empty()) continue;
        client.send_text(user, line);
        if (drain(true)) std::cout << "(survey complete)\n";
    }
    std::cout << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conversation simulator for the loopback channel"};
    app.require_subcommand(1);
    int timeout_ms = 5000;
    app.add_option("--timeout-ms", timeout_ms, "Wait per expected message")->capture_default_str();

    std::string script, out, user = "sim-user", locale_hint;
    int clients = 5;

    Target run_target;
    auto* run_cmd = app.add_subcommand("run", "Replay a transcript script; exit 0 iff it passes");
    run_cmd->add_option("script", script, "Transcript file")->required()->check(CLI::ExistingFile);
    run_target.add_to(run_cmd);

    Target load_target;
    auto* load_cmd = app.add_subcommand("load", "Run one script as several concurrent users");
    load_cmd->add_option("--script", script, "Transcript file")->required()->check(CLI::ExistingFile);
    load_cmd->add_option("--clients", clients, "Number of concurrent users")->capture_default_str();
    load_target.add_to(load_cmd);

    Target record_target;
    auto* record_cmd = app.add_subcommand("record", "Replay the sends of a script and write the replies as a script");
    record_cmd->add_option("script", script, "Transcript file")->required()->check(CLI::ExistingFile);
    record_cmd->add_option("-o,--out", out, "Output file, - for stdout");
    record_target.add_to(record_cmd);

    Target chat_target;
    auto* chat_cmd = app.add_subcommand("chat", "Interactive conversation");
    chat_cmd->add_option("--user", user, "Simulated user id")->capture_default_str();
    chat_cmd->add_option("--locale-hint", locale_hint, "Shown in the banner only; the bot asks for the language");
    chat_target.add_to(chat_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) return run(script, run_target, timeout_ms);
        if (*load_cmd) return load(script, load_target, clients, timeout_ms);
        if (*record_cmd) return record(script, record_target, out, timeout_ms);
        if (*chat_cmd) return chat(chat_target, user, locale_hint, timeout_ms);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
