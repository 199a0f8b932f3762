#pragma once

#include <optional>
#include <string>
#include <vector>

#include "surveybot/analytics/stats.hpp"
#include "surveybot/persistence/record.hpp"

namespace surveybot::analytics {

inline constexpr const char* kNoData = "No data";

enum class GroupKey { device, immigrant };

std::string_view to_string(GroupKey key);

struct SusGroup {
    std::string label;
    int n = 0;
    double mean = 0.0;
    std::optional<double> sd;  // absent when n < 2
    scoring::Benchmark benchmark = scoring::Benchmark::at;
};

/// SUS per group over records with all ten SUS answers. Groups with no such
/// records are omitted; a null group value is labelled "No data".
std::vector<SusGroup> sus_summary(const std::vector<persistence::SessionRecord>& records, GroupKey key);

struct DemographicsRow {
    std::string field;
    std::string category;
    int count = 0;
    double percent = 0.0;  // of all records, one decimal
};

/// Count and percentage per category for Nationality, Country of birth,
/// Gender, Device and Immigrant. Within a field rows are ordered by count,
/// then label, with "No data" last.
std::vector<DemographicsRow> demographics_table(const std::vector<persistence::SessionRecord>& records);

/// count / total as a percentage rounded half up to one decimal.
double percent_one_decimal(int count, int total);

/// "pl_PL" -> "Polish"; unknown locales are returned as given.
std::string nationality_from_locale(const std::string& locale);

std::string format_ttest_text(const GroupStats& a, const GroupStats& b, const TTestResult& r);
std::string format_sus_text(const std::vector<SusGroup>& groups, GroupKey key);
std::string format_sus_csv(const std::vector<SusGroup>& groups, GroupKey key);
std::string format_demographics_text(const std::vector<DemographicsRow>& rows, int total);
std::string format_demographics_csv(const std::vector<DemographicsRow>& rows);

}  // namespace surveybot::analytics
