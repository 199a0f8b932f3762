#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "surveybot/localization/catalog.hpp"
#include "surveybot/scoring/scoring.hpp"

namespace surveybot::persistence {

/// Profile fields fetched from the channel on first contact. Absent means unknown.
struct ProfileAttributes {
    std::optional<std::string> first_name;
    std::optional<std::string> last_name;
    std::optional<std::string> locale;
    std::optional<std::string> hometown;
    std::optional<double> timezone;  // hours from UTC
    std::optional<std::string> birthday;
    std::optional<std::string> gender;
    std::optional<std::string> profile_pic;

    bool operator==(const ProfileAttributes&) const = default;
};

/// One respondent, flattened the way the export lays it out.
struct SessionRecord {
    std::int64_t id = 0;
    std::string fb_id;
    ProfileAttributes profile;
    std::array<std::optional<int>, scoring::kTipiItems> tipi{};
    std::array<std::optional<double>, 5> traits{};  // indexed by scoring::Trait
    std::optional<std::string> employed;             // "yes" / "no"
    std::array<std::optional<int>, scoring::kCompetencyItems> competency{};
    std::array<std::optional<int>, scoring::kSusItems> sus{};
    std::int64_t record_created = 0;  // unix ms
    std::optional<std::string> language;
    std::optional<int> age;
    std::optional<int> it_skills;
    std::optional<int> immigrant;  // 1 yes, 0 no
    std::optional<std::string> device;
    bool finalized = false;  // not exported

    bool operator==(const SessionRecord&) const = default;

    bool tipi_complete() const;
    bool sus_complete() const;
    std::optional<scoring::SusScore> sus_score() const;
};

enum class StorageErrorCode { duplicate_active_session, field_already_set, unknown_field, not_found, storage };

std::string_view to_string(StorageErrorCode code);

class StorageError : public std::runtime_error {
public:
    StorageError(StorageErrorCode code, const std::string& message);
    StorageErrorCode code() const { return code_; }

private:
    StorageErrorCode code_;
};

/// Writes one answer into the record. Throws FIELD_ALREADY_SET if the target
/// is filled, UNKNOWN_FIELD if the question id has no column or the value has
/// no mapping.
void apply_answer(SessionRecord& record, std::string_view question_id, int value);

/// Trait scores rounded to one decimal. Throws FIELD_ALREADY_SET if any is present.
void apply_scores(SessionRecord& record, const scoring::BigFiveProfile& profile);

/// True if the stored traits equal score_tipi of the stored answers.
bool scores_consistent(const SessionRecord& record, const scoring::TipiKeying& keying);

/// Export column names, in order.
const std::vector<std::string>& export_columns();

/// Cells in export column order; nullopt for null.
std::vector<std::optional<std::string>> to_row(const SessionRecord& record);

/// Inverse of to_row. Throws std::invalid_argument on malformed cells.
SessionRecord from_row(const std::vector<std::optional<std::string>>& cells);

/// "2022-04-15T05:20:00.000Z"
std::string format_timestamp(std::int64_t unix_ms);
std::int64_t parse_timestamp(std::string_view iso);

}  // namespace surveybot::persistence
