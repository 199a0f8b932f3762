#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "surveybot/persistence/record.hpp"

namespace surveybot::persistence {

using CsvRow = std::vector<std::optional<std::string>>;

/// RFC 4180 line: fields with commas, quotes or line breaks are quoted.
/// Null and empty cells are both written as nothing.
std::string format_csv_row(const CsvRow& row);

/// Parses a whole document. Empty cells come back as nullopt. Accepts LF
/// or CRLF line ends; throws std::invalid_argument on an unterminated quote.
std::vector<CsvRow> parse_csv(std::string_view text);

/// Header plus one row per record, CRLF line ends, UTF-8 passed through.
std::string records_to_csv(const std::vector<SessionRecord>& records);

/// Inverse of records_to_csv. The header must match export_columns().
/// `finalized` is not exported and comes back false.
std::vector<SessionRecord> records_from_csv(std::string_view text);

}  // namespace surveybot::persistence
