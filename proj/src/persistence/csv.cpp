#include "surveybot/persistence/csv.hpp"

#include <stdexcept>

namespace surveybot::persistence {

std::string format_csv_row(const CsvRow& row) {
    std::string out;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        if (!row[i]) continue;
        const std::string& v = *row[i];
        if (v.find_first_of(",\"\r\n") == std::string::npos) {
            out += v;
            continue;
        }
        out += '"';
        for (char c : v) {
            if (c == '"') out += '"';
            out += c;
        }
        out += '"';
    }
    return out;
}

std::vector<CsvRow> parse_csv(std::string_view text) {
    std::vector<CsvRow> rows;
    CsvRow row;
    std::string field;
    bool quoted = false;
    bool in_quotes = false;
    bool row_started = false;

    auto end_field = [&] {
        row.push_back(field.empty() && !quoted ? std::nullopt : std::optional<std::string>(field));
        if (row.back() && row.back()->empty()) row.back() = std::nullopt;
        field.clear();
        quoted = false;
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
        row_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        row_started = true;
        switch (c) {
            case '"':
                in_quotes = true;
                quoted = true;
                break;
            case ',': end_field(); break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
                end_row();
                break;
            case '\n': end_row(); break;
            default: field += c;
        }
    }
    if (in_quotes) throw std::invalid_argument("unterminated quoted field");
    if (row_started) end_row();
    return rows;
}

std::string records_to_csv(const std::vector<SessionRecord>& records) {
    CsvRow header;
    for (const auto& c : export_columns()) header.emplace_back(c);
    std::string out = format_csv_row(header) + "\r\n";
    for (const auto& r : records) out += format_csv_row(to_row(r)) + "\r\n";
    return out;
}

std::vector<SessionRecord> records_from_csv(std::string_view text) {
    auto rows = parse_csv(text);
    if (rows.empty()) throw std::invalid_argument("missing header row");
    const auto& columns = export_columns();
    const auto& header = rows.front();
    if (header.size() != columns.size()) throw std::invalid_argument("header has wrong column count");
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (!header[i] || *header[i] != columns[i])
            throw std::invalid_argument("unexpected header column " + std::to_string(i + 1));
    std::vector<SessionRecord> records;
    for (std::size_t i = 1; i < rows.size(); ++i) records.push_back(from_row(rows[i]));
    return records;
}

}  // namespace surveybot::persistence
