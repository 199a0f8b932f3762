#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "surveybot/sim/loopback_client.hpp"
#include "surveybot/sim/transcript.hpp"

namespace surveybot::sim {

struct RunOptions {
    std::chrono::milliseconds timeout{5000};  // per expected message
    /// Overrides the script's @user (used to run one script as many users).
    std::string user_override;
};

enum class Verdict { pass, mismatch, timeout, not_finalized, error };

std::string_view to_string(Verdict v);

struct RunResult {
    Verdict verdict = Verdict::pass;
    int step = -1;  // 0-based index of the failing step
    int line = 0;
    std::string expected;
    std::string actual;
    std::vector<ReceivedMessage> received;  // everything the user got, in order

    bool passed() const { return verdict == Verdict::pass; }
    /// "PASS" or "FAIL step 12 (line 30): expected ..., got ..."
    std::string summary() const;
};

RunResult run_script(const Transcript& script, LoopbackClient& client, const RunOptions& options = {});

/// Replays only the sends of `script` and writes a transcript that expects
/// exactly what the gateway answered. Used to produce golden files.
std::string record_script(const Transcript& script, LoopbackClient& client, const RunOptions& options = {});

/// Runs `clients` copies concurrently as users "<user>-1" ... "<user>-N".
std::vector<RunResult> run_load(const Transcript& script, const std::string& base_url, int clients,
                                const RunOptions& options = {});

}  // namespace surveybot::sim
