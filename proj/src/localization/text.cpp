#include "surveybot/localization/text.hpp"

namespace surveybot::text {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_word_char(char32_t c) {
    if (c < 0x80) return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    // Latin-1 letters (minus the two operators), Latin Extended-A/B, Cyrillic.
    if (c >= 0xC0 && c <= 0x24F) return c != 0xD7 && c != 0xF7;
    if (c >= 0x400 && c <= 0x52F) return true;
    if (c == 0x2BC || c == 0x2019) return true;  // apostrophes used inside Ukrainian words
    return false;
}

}  // namespace

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::u32string decode_utf8(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const auto b0 = static_cast<unsigned char>(s[i]);
        int extra = 0;
        char32_t cp = 0;
        if (b0 < 0x80) {
            cp = b0;
        } else if ((b0 & 0xE0) == 0xC0) {
            cp = b0 & 0x1F;
            extra = 1;
        } else if ((b0 & 0xF0) == 0xE0) {
            cp = b0 & 0x0F;
            extra = 2;
        } else if ((b0 & 0xF8) == 0xF0) {
            cp = b0 & 0x07;
            extra = 3;
        } else {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        if (i + static_cast<std::size_t>(extra) >= s.size()) {
            out.push_back(0xFFFD);  // truncated sequence
            break;
        }
        bool ok = true;
        for (int k = 1; k <= extra; ++k) {
            const auto b = static_cast<unsigned char>(s[i + k]);
            if ((b & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (b & 0x3F);
        }
        if (!ok) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += static_cast<std::size_t>(extra) + 1;
    }
    return out;
}

std::string encode_utf8(std::u32string_view s) {
    std::string out;
    out.reserve(s.size());
    for (const char32_t c : s) {
        if (c < 0x80) {
            out.push_back(static_cast<char>(c));
        } else if (c < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (c >> 6)));
            out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        } else if (c < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (c >> 12)));
            out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (c >> 18)));
            out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        }
    }
    return out;
}

char32_t fold_case(char32_t c) {
    if (c >= 'A' && c <= 'Z') return c + 0x20;
    if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 0x20;
    if (c >= 0x100 && c <= 0x137) return c | 1;
    if (c >= 0x139 && c <= 0x148) return (c & 1) ? c + 1 : c;
    if (c >= 0x14A && c <= 0x177) return c | 1;
    if (c == 0x178) return 0xFF;
    if (c >= 0x179 && c <= 0x17E) return (c & 1) ? c + 1 : c;
    if (c >= 0x410 && c <= 0x42F) return c + 0x20;
    if (c >= 0x400 && c <= 0x40F) return c + 0x50;
    if ((c >= 0x460 && c <= 0x481) || (c >= 0x48A && c <= 0x4BF) || (c >= 0x4D0 && c <= 0x4FF))
        return c | 1;  // includes Ґ -> ґ
    return c;
}

std::string to_lower(std::string_view s) {
    std::u32string cps = decode_utf8(s);
    for (auto& c : cps) c = fold_case(c);
    return encode_utf8(cps);
}

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> tokens;
    std::u32string current;
    for (const char32_t c : decode_utf8(s)) {
        if (is_word_char(c)) {
            current.push_back(fold_case(c));
        } else if (!current.empty()) {
            tokens.push_back(encode_utf8(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(encode_utf8(current));
    return tokens;
}

std::size_t codepoint_count(std::string_view s) {
    std::size_t n = 0;
    for (const char c : s)
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
    return n;
}

std::vector<std::string> split_into_chunks(std::string_view s, std::size_t limit) {
    std::vector<std::string> chunks;
    if (limit == 0) return chunks;
    const std::u32string cps = decode_utf8(trim(s));
    auto is_blank = [](char32_t c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };

    std::size_t start = 0;
    while (start < cps.size()) {
        while (start < cps.size() && is_blank(cps[start])) ++start;
        if (start >= cps.size()) break;
        std::size_t end = cps.size();
        if (end - start > limit) {
            // Prefer a paragraph break, then a line break, then any blank.
            std::size_t cut = start + limit;
            auto last_break = [&](auto pred) {
                std::size_t b = cut;
                while (b > start && !pred(b)) --b;
                return b;
            };
            std::size_t brk = last_break([&](std::size_t i) { return cps[i] == '\n' && cps[i - 1] == '\n'; });
            if (brk <= start) brk = last_break([&](std::size_t i) { return cps[i] == '\n'; });
            if (brk <= start) brk = last_break([&](std::size_t i) { return is_blank(cps[i]); });
            end = brk > start ? brk : cut;
        }
        std::size_t piece_end = end;
        while (piece_end > start && is_blank(cps[piece_end - 1])) --piece_end;
        chunks.push_back(encode_utf8(std::u32string_view(cps).substr(start, piece_end - start)));
        start = end;
    }
    return chunks;
}

}  // namespace surveybot::text
