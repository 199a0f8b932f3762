#pragma once

#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace surveybot::sim {

struct Send {
    std::string text;
};

struct ExpectExact {
    std::string text;
};

struct ExpectPattern {
    std::string source;
    std::regex pattern;
};

struct ExpectBatchEnd {};

using StepAction = std::variant<Send, ExpectExact, ExpectPattern, ExpectBatchEnd>;

struct Step {
    StepAction action;
    int line = 0;  // 1-based line in the script
};

/// A scripted conversation.
///
///   # comment
///   @user alice            simulated user id
///   @locale en             informational
///   @profile fixture-key   informational
///   @expect-finalized      the session must be finalized at the end
///   > text                 send
///   < text                 expect this exact message (\n and \\ escapes)
///   < /regex/              expect a message matching the ECMAScript regex
///   ---                    the previous message closed its batch
struct Transcript {
    std::string user = "sim-user";
    std::string locale;
    std::string profile;
    bool expect_finalized = false;
    std::vector<Step> steps;
};

class TranscriptParseError : public std::runtime_error {
public:
    TranscriptParseError(int line, const std::string& message);
    int line() const { return line_; }

private:
    int line_;
};

/// Throws TranscriptParseError; a script must start with a send.
Transcript parse_transcript(std::string_view text);
Transcript load_transcript(const std::string& path);

std::string escape_line(std::string_view text);
std::string unescape_line(std::string_view text);

}  // namespace surveybot::sim
