#include "surveybot/persistence/record.hpp"

#include <charconv>
#include <cstdio>
#include <ctime>

namespace surveybot::persistence {

namespace {

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

/// "tipi.q3" with prefix "tipi.q" and 10 items -> 2.
std::optional<std::size_t> item_index(std::string_view id, std::string_view prefix, std::size_t count) {
    if (!starts_with(id, prefix)) return std::nullopt;
    std::string_view digits = id.substr(prefix.size());
    std::size_t n = 0;
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec != std::errc() || p != digits.data() + digits.size() || n < 1 || n > count) return std::nullopt;
    return n - 1;
}

template <typename T>
void set_once(std::optional<T>& slot, T value, std::string_view field) {
    if (slot) throw StorageError(StorageErrorCode::field_already_set, std::string(field) + " already set");
    slot = std::move(value);
}

[[noreturn]] void unknown(std::string_view question_id, int value) {
    throw StorageError(StorageErrorCode::unknown_field,
                       "no column for " + std::string(question_id) + "=" + std::to_string(value));
}

std::string format_int(std::int64_t v) { return std::to_string(v); }

std::string format_tenth(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return buf;
}

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

template <typename T>
T parse_number(const std::string& s, std::string_view column) {
    T v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw std::invalid_argument("bad number in " + std::string(column) + ": " + s);
    return v;
}

}  // namespace

std::string_view to_string(StorageErrorCode code) {
    switch (code) {
        case StorageErrorCode::duplicate_active_session: return "DUPLICATE_ACTIVE_SESSION";
        case StorageErrorCode::field_already_set: return "FIELD_ALREADY_SET";
        case StorageErrorCode::unknown_field: return "UNKNOWN_FIELD";
        case StorageErrorCode::not_found: return "NOT_FOUND";
        case StorageErrorCode::storage: return "STORAGE";
    }
    return "?";
}

StorageError::StorageError(StorageErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

bool SessionRecord::tipi_complete() const {
    for (const auto& a : tipi)
        if (!a) return false;
    return true;
}

bool SessionRecord::sus_complete() const {
    for (const auto& a : sus)
        if (!a) return false;
    return true;
}

std::optional<scoring::SusScore> SessionRecord::sus_score() const {
    if (!sus_complete()) return std::nullopt;
    std::array<int, scoring::kSusItems> values{};
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = *sus[i];
    return scoring::score_sus(values);
}

void apply_answer(SessionRecord& r, std::string_view id, int value) {
    if (auto i = item_index(id, "tipi.q", scoring::kTipiItems)) return set_once(r.tipi[*i], value, id);
    if (auto i = item_index(id, "sus.q", scoring::kSusItems)) return set_once(r.sus[*i], value, id);
    if (auto i = item_index(id, "competency.q", scoring::kCompetencyItems))
        return set_once(r.competency[*i], value, id);
    if (id == "employment") {
        if (value != 1 && value != 2) unknown(id, value);
        return set_once(r.employed, std::string(value == 1 ? "yes" : "no"), id);
    }
    if (id == "meta.age") return set_once(r.age, value, id);
    if (id == "meta.it_skills") return set_once(r.it_skills, value, id);
    if (id == "meta.immigrant") {
        if (value != 1 && value != 2) unknown(id, value);
        return set_once(r.immigrant, value == 1 ? 1 : 0, id);
    }
    if (id == "meta.device") {
        static const char* const names[] = {"computer", "mobile phone", "other"};
        if (value < 1 || value > 3) unknown(id, value);
        return set_once(r.device, std::string(names[value - 1]), id);
    }
    unknown(id, value);
}

void apply_scores(SessionRecord& r, const scoring::BigFiveProfile& profile) {
    for (const auto& t : r.traits)
        if (t) throw StorageError(StorageErrorCode::field_already_set, "trait scores already set");
    for (std::size_t i = 0; i < r.traits.size(); ++i) r.traits[i] = scoring::round_to_tenth(profile.scores[i]);
}

bool scores_consistent(const SessionRecord& r, const scoring::TipiKeying& keying) {
    if (!r.tipi_complete()) return false;
    std::array<int, scoring::kTipiItems> answers{};
    for (std::size_t i = 0; i < answers.size(); ++i) answers[i] = *r.tipi[i];
    const auto profile = scoring::score_tipi(answers, keying);
    for (std::size_t i = 0; i < r.traits.size(); ++i)
        if (!r.traits[i] || *r.traits[i] != scoring::round_to_tenth(profile.scores[i])) return false;
    return true;
}

const std::vector<std::string>& export_columns() {
    static const std::vector<std::string> columns = [] {
        std::vector<std::string> c = {"Id",       "Fb_Id",    "First_name", "Last_name", "Locale",
                                      "Hometown", "Timezone", "Birthday",   "Gender"};
        for (int i = 1; i <= 10; ++i) c.push_back("TIPIPL_odp_" + std::to_string(i));
        for (const char* t : {"TIPIPL_ekstarwersja", "TIPIPL_ugodowosc", "TIPIPL_sumiennosc", "TIPIPL_stabilnosc",
                              "TIPIPL_otwartosc"})
            c.push_back(t);
        c.push_back("DopKomp_czy_pracujesz");
        c.push_back("DopKomp_odp_num_1");
        for (int i = 1; i <= 10; ++i) c.push_back("Inter_odp_" + std::to_string(i));
        for (const char* t : {"Record_created", "Jezyk", "Profile_pic", "Age", "It_skils", "Immigrant", "Device"})
            c.push_back(t);
        return c;
    }();
    return columns;
}

std::vector<std::optional<std::string>> to_row(const SessionRecord& r) {
    using Cell = std::optional<std::string>;
    std::vector<Cell> row;
    row.reserve(export_columns().size());
    auto opt_int = [](const std::optional<int>& v) -> Cell { return v ? Cell(format_int(*v)) : std::nullopt; };

    row.push_back(format_int(r.id));
    row.push_back(r.fb_id);
    const auto& p = r.profile;
    row.push_back(p.first_name);
    row.push_back(p.last_name);
    row.push_back(p.locale);
    row.push_back(p.hometown);
    row.push_back(p.timezone ? Cell(format_double(*p.timezone)) : std::nullopt);
    row.push_back(p.birthday);
    row.push_back(p.gender);
    for (const auto& a : r.tipi) row.push_back(opt_int(a));
    for (const auto& t : r.traits) row.push_back(t ? Cell(format_tenth(*t)) : std::nullopt);
    row.push_back(r.employed);

    bool any = false;
    std::string list;
    for (std::size_t i = 0; i < r.competency.size(); ++i) {
        if (i) list += ';';
        if (r.competency[i]) {
            list += format_int(*r.competency[i]);
            any = true;
        }
    }
    row.push_back(any ? Cell(list) : std::nullopt);

    for (const auto& a : r.sus) row.push_back(opt_int(a));
    row.push_back(format_timestamp(r.record_created));
    row.push_back(r.language);
    row.push_back(p.profile_pic);
    row.push_back(opt_int(r.age));
    row.push_back(opt_int(r.it_skills));
    row.push_back(opt_int(r.immigrant));
    row.push_back(r.device);
    return row;
}

SessionRecord from_row(const std::vector<std::optional<std::string>>& cells) {
    const auto& columns = export_columns();
    if (cells.size() != columns.size())
        throw std::invalid_argument("expected " + std::to_string(columns.size()) + " cells, got " +
                                    std::to_string(cells.size()));
    std::size_t k = 0;
    auto next = [&]() -> const std::optional<std::string>& { return cells[k++]; };
    auto opt_int = [&]() -> std::optional<int> {
        const auto& c = next();
        if (!c) return std::nullopt;
        return parse_number<int>(*c, columns[k - 1]);
    };
    auto opt_double = [&]() -> std::optional<double> {
        const auto& c = next();
        if (!c) return std::nullopt;
        return parse_number<double>(*c, columns[k - 1]);
    };

    SessionRecord r;
    const auto& id = next();
    if (!id) throw std::invalid_argument("Id is empty");
    r.id = parse_number<std::int64_t>(*id, "Id");
    const auto& fb = next();
    if (!fb) throw std::invalid_argument("Fb_Id is empty");
    r.fb_id = *fb;
    auto& p = r.profile;
    p.first_name = next();
    p.last_name = next();
    p.locale = next();
    p.hometown = next();
    p.timezone = opt_double();
    p.birthday = next();
    p.gender = next();
    for (auto& a : r.tipi) a = opt_int();
    for (auto& t : r.traits) t = opt_double();
    r.employed = next();

    if (const auto& list = next()) {
        std::size_t item = 0;
        std::size_t start = 0;
        while (true) {
            if (item >= r.competency.size()) throw std::invalid_argument("too many competency answers");
            const std::size_t end = list->find(';', start);
            const std::string piece = list->substr(start, end == std::string::npos ? std::string::npos : end - start);
            if (!piece.empty()) r.competency[item] = parse_number<int>(piece, "DopKomp_odp_num_1");
            ++item;
            if (end == std::string::npos) break;
            start = end + 1;
        }
        if (item != r.competency.size()) throw std::invalid_argument("too few competency answers");
    }

    for (auto& a : r.sus) a = opt_int();
    const auto& created = next();
    if (!created) throw std::invalid_argument("Record_created is empty");
    r.record_created = parse_timestamp(*created);
    r.language = next();
    p.profile_pic = next();
    r.age = opt_int();
    r.it_skills = opt_int();
    r.immigrant = opt_int();
    r.device = next();
    return r;
}

std::string format_timestamp(std::int64_t unix_ms) {
    std::int64_t secs = unix_ms / 1000;
    std::int64_t ms = unix_ms % 1000;
    if (ms < 0) {
        ms += 1000;
        --secs;
    }
    const std::time_t t = static_cast<std::time_t>(secs);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                  tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
    return buf;
}

std::int64_t parse_timestamp(std::string_view iso) {
    std::tm tm{};
    int ms = 0;
    const std::string s(iso);
    int consumed = 0;
    if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%3dZ%n", &tm.tm_year, &tm.tm_mon, &tm.tm_mday, &tm.tm_hour,
                    &tm.tm_min, &tm.tm_sec, &ms, &consumed) != 7 ||
        consumed != static_cast<int>(s.size()))
        throw std::invalid_argument("bad timestamp: " + s);
    tm.tm_year -= 1900;
    tm.tm_mon -= 1;
    return static_cast<std::int64_t>(timegm(&tm)) * 1000 + ms;
}

}  // namespace surveybot::persistence
