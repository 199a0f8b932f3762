#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers shared by the intent matcher and the message chunker.
namespace surveybot::text {

std::string_view trim(std::string_view s);

std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);

/// Lowercases ASCII, Latin-1, Latin Extended-A (Polish letters) and
/// Cyrillic (Ukrainian letters). Other code points pass through.
char32_t fold_case(char32_t c);
std::string to_lower(std::string_view s);

/// Lowercased word tokens; anything that is not a letter or digit separates.
std::vector<std::string> tokenize(std::string_view s);

std::size_t codepoint_count(std::string_view s);

/// Splits `s` into pieces of at most `limit` code points, breaking at
/// whitespace where possible. Leading/trailing spaces of each piece are
/// dropped; explicit line breaks are kept inside a piece.
std::vector<std::string> split_into_chunks(std::string_view s, std::size_t limit);

}  // namespace surveybot::text
