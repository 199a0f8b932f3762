#include "surveybot/sim/runner.hpp"

#include <deque>
#include <thread>

namespace surveybot::sim {

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "PASS";
        case Verdict::mismatch: return "MISMATCH";
        case Verdict::timeout: return "TIMEOUT";
        case Verdict::not_finalized: return "NOT_FINALIZED";
        case Verdict::error: return "ERROR";
    }
    return "?";
}

std::string RunResult::summary() const {
    if (passed()) return "PASS";
    return "FAIL " + std::string(to_string(verdict)) + " at step " + std::to_string(step) + " (line " +
           std::to_string(line) + "): expected " + expected + ", got " + actual;
}

namespace {

/// Pulls messages for one user and hands them out one at a time.
class Inbox {
public:
    Inbox(LoopbackClient& client, std::string user, std::chrono::milliseconds timeout)
        : client_(client), user_(std::move(user)), timeout_(timeout) {
        // Resume after whatever the user already received.
        for (const auto& m : client_.poll(user_, 0, std::chrono::milliseconds(0)).messages) last_seq_ = m.seq;
    }

    /// Next message, or nullopt after the timeout.
    std::optional<ReceivedMessage> next() {
        const auto deadline = std::chrono::steady_clock::now() + timeout_;
        while (buffer_.empty()) {
            const auto left =
                std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
            if (left.count() <= 0) return std::nullopt;
            fetch(left);
        }
        auto m = std::move(buffer_.front());
        buffer_.pop_front();
        return m;
    }

    /// Waits until the current batch is closed; false on timeout.
    bool settle() {
        const auto deadline = std::chrono::steady_clock::now() + timeout_;
        while (open_batch_) {
            const auto left =
                std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
            if (left.count() <= 0) return false;
            fetch(left);
        }
        return true;
    }

    void expect_batch() { open_batch_ = true; }
    std::deque<ReceivedMessage>& buffered() { return buffer_; }
    bool finalized() { return client_.poll(user_, last_seq_, std::chrono::milliseconds(0)).finalized; }
    const std::vector<ReceivedMessage>& log() const { return log_; }

private:
    void fetch(std::chrono::milliseconds wait) {
        for (auto& m : client_.poll(user_, last_seq_, std::min(wait, std::chrono::milliseconds(1000))).messages) {
            last_seq_ = m.seq;
            if (m.last_in_batch) open_batch_ = false;
            log_.push_back(m);
            buffer_.push_back(std::move(m));
        }
    }

    LoopbackClient& client_;
    std::string user_;
    std::chrono::milliseconds timeout_;
    std::uint64_t last_seq_ = 0;
    bool open_batch_ = false;
    std::deque<ReceivedMessage> buffer_;
    std::vector<ReceivedMessage> log_;
};

std::string quote(const std::string& s) { return "\"" + escape_line(s) + "\""; }

std::string describe(const StepAction& a) {
    if (auto* s = std::get_if<Send>(&a)) return "send " + quote(s->text);
    if (auto* e = std::get_if<ExpectExact>(&a)) return quote(e->text);
    if (auto* p = std::get_if<ExpectPattern>(&a)) return "/" + p->source + "/";
    return "end of batch";
}

}  // namespace

RunResult run_script(const Transcript& script, LoopbackClient& client, const RunOptions& options) {
    const std::string user = options.user_override.empty() ? script.user : options.user_override;
    RunResult result;
    auto fail = [&](Verdict v, int step, int line, std::string expected, std::string actual) {
        result.verdict = v;
        result.step = step;
        result.line = line;
        result.expected = std::move(expected);
        result.actual = std::move(actual);
    };

    try {
        Inbox inbox(client, user, options.timeout);
        std::optional<ReceivedMessage> last;
        auto check_drained = [&](int step, int line, const std::string& expected) {
            if (!inbox.settle()) {
                fail(Verdict::timeout, step, line, "end of the previous batch", "no further message");
                return false;
            }
            if (!inbox.buffered().empty()) {
                fail(Verdict::mismatch, step, line, expected, "unexpected " + quote(inbox.buffered().front().text));
                return false;
            }
            return true;
        };

        for (std::size_t i = 0; i < script.steps.size() && result.passed(); ++i) {
            const auto& step = script.steps[i];
            const int idx = static_cast<int>(i);
            if (const auto* send = std::get_if<Send>(&step.action)) {
                if (!check_drained(idx, step.line, describe(step.action))) break;
                client.send_text(user, send->text);
                inbox.expect_batch();
                continue;
            }
            if (std::holds_alternative<ExpectBatchEnd>(step.action)) {
                if (!last || !last->last_in_batch)
                    fail(Verdict::mismatch, idx, step.line, "end of batch",
                         last ? "batch continues after " + quote(last->text) : "no message yet");
                continue;
            }
            auto m = inbox.next();
            if (!m) {
                fail(Verdict::timeout, idx, step.line, describe(step.action), "no message");
                break;
            }
            bool ok = false;
            if (const auto* e = std::get_if<ExpectExact>(&step.action)) ok = m->text == e->text;
            else if (const auto* p = std::get_if<ExpectPattern>(&step.action)) ok = std::regex_search(m->text, p->pattern);
            if (!ok) fail(Verdict::mismatch, idx, step.line, describe(step.action), quote(m->text));
            last = std::move(m);
        }
        if (result.passed()) {
            const int end = static_cast<int>(script.steps.size());
            const int line = script.steps.empty() ? 0 : script.steps.back().line;
            if (check_drained(end, line, "end of script") && script.expect_finalized && !inbox.finalized())
                fail(Verdict::not_finalized, end, line, "finalized session", "session still open");
        }
        result.received = inbox.log();
    } catch (const std::exception& e) {
        fail(Verdict::error, result.step, result.line, "a working gateway", e.what());
    }
    return result;
}

std::string record_script(const Transcript& script, LoopbackClient& client, const RunOptions& options) {
    const std::string user = options.user_override.empty() ? script.user : options.user_override;
    std::string out;
    out += "@user " + script.user + "\n";
    if (!script.locale.empty()) out += "@locale " + script.locale + "\n";
    if (!script.profile.empty()) out += "@profile " + script.profile + "\n";
    if (script.expect_finalized) out += "@expect-finalized\n";

    Inbox inbox(client, user, options.timeout);
    for (const auto& step : script.steps) {
        const auto* send = std::get_if<Send>(&step.action);
        if (!send) continue;
        out += "\n> " + escape_line(send->text) + "\n";
        client.send_text(user, send->text);
        inbox.expect_batch();
        if (!inbox.settle()) throw ClientError("timed out waiting for the reply to line " + std::to_string(step.line));
        for (auto& m : inbox.buffered()) {
            out += "< " + escape_line(m.text) + "\n";
            if (m.last_in_batch) out += "---\n";
        }
        inbox.buffered().clear();
    }
    return out;
}

std::vector<RunResult> run_load(const Transcript& script, const std::string& base_url, int clients,
                                const RunOptions& options) {
    std::vector<RunResult> results(static_cast<std::size_t>(clients));
    std::vector<std::thread> threads;
    for (int i = 0; i < clients; ++i) {
        threads.emplace_back([&, i] {
            LoopbackClient client(base_url);
            RunOptions o = options;
            o.user_override = script.user + "-" + std::to_string(i + 1);
            results[static_cast<std::size_t>(i)] = run_script(script, client, o);
        });
    }
    for (auto& t : threads) t.join();
    return results;
}

}  // namespace surveybot::sim
