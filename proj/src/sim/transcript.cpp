#include "surveybot/sim/transcript.hpp"

#include <fstream>
#include <sstream>

namespace surveybot::sim {

TranscriptParseError::TranscriptParseError(int line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

std::string escape_line(std::string_view text) {
    std::string out;
    for (char c : text) {
        if (c == '\\') out += "\\\\";
        else if (c == '\n') out += "\\n";
        else out += c;
    }
    return out;
}

std::string unescape_line(std::string_view text) {
    std::string out;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\\' && i + 1 < text.size()) {
            const char n = text[i + 1];
            if (n == 'n') {
                out += '\n';
                ++i;
                continue;
            }
            if (n == '\\') {
                out += '\\';
                ++i;
                continue;
            }
        }
        out += text[i];
    }
    return out;
}

Transcript parse_transcript(std::string_view text) {
    Transcript t;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (raw.empty() || raw.front() == '#') continue;

        if (raw.front() == '@') {
            const auto space = raw.find(' ');
            const std::string name = raw.substr(1, space == std::string::npos ? std::string::npos : space - 1);
            const std::string value = space == std::string::npos ? "" : raw.substr(space + 1);
            if (name == "user") {
                if (value.empty()) throw TranscriptParseError(line, "@user needs a value");
                t.user = value;
            } else if (name == "locale") {
                t.locale = value;
            } else if (name == "profile") {
                t.profile = value;
            } else if (name == "expect-finalized") {
                t.expect_finalized = true;
            } else {
                throw TranscriptParseError(line, "unknown directive @" + name);
            }
            continue;
        }
        if (raw == "---") {
            t.steps.push_back({ExpectBatchEnd{}, line});
            continue;
        }
        if (raw.size() < 2 || (raw[0] != '>' && raw[0] != '<') || raw[1] != ' ')
            throw TranscriptParseError(line, "expected '> ', '< ', '---', '@' or '#'");

        const std::string body = raw.substr(2);
        if (raw[0] == '>') {
            if (body.empty()) throw TranscriptParseError(line, "empty send");
            t.steps.push_back({Send{unescape_line(body)}, line});
        } else if (body.size() >= 2 && body.front() == '/' && body.back() == '/') {
            const std::string source = body.substr(1, body.size() - 2);
            try {
                t.steps.push_back({ExpectPattern{source, std::regex(source, std::regex::ECMAScript)}, line});
            } catch (const std::regex_error& e) {
                throw TranscriptParseError(line, std::string("bad pattern: ") + e.what());
            }
        } else {
            t.steps.push_back({ExpectExact{unescape_line(body)}, line});
        }
    }
    if (t.steps.empty() || !std::holds_alternative<Send>(t.steps.front().action))
        throw TranscriptParseError(t.steps.empty() ? line : t.steps.front().line, "a script must start with a send");
    return t;
}

Transcript load_transcript(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_transcript(ss.str());
}

}  // namespace surveybot::sim
