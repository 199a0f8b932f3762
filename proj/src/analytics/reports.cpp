#include "surveybot/analytics/reports.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "surveybot/persistence/csv.hpp"

namespace surveybot::analytics {

namespace {

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::string pad(const std::string& s, std::size_t width) {
    // Width in code points so Polish and Ukrainian labels line up.
    std::size_t cps = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80) ++cps;
    return cps >= width ? s : s + std::string(width - cps, ' ');
}

std::optional<std::string> group_value(const persistence::SessionRecord& r, GroupKey key) {
    switch (key) {
        case GroupKey::device: return r.device;
        case GroupKey::immigrant:
            if (!r.immigrant) return std::nullopt;
            return std::string(*r.immigrant ? "Yes" : "No");
    }
    return std::nullopt;
}

std::string csv_line(std::vector<std::optional<std::string>> cells) {
    return persistence::format_csv_row(cells) + "\r\n";
}

}  // namespace

std::string_view to_string(GroupKey key) { return key == GroupKey::device ? "device" : "immigrant"; }

std::vector<SusGroup> sus_summary(const std::vector<persistence::SessionRecord>& records, GroupKey key) {
    std::map<std::string, std::vector<double>> groups;
    for (const auto& r : records) {
        const auto score = r.sus_score();
        if (!score) continue;
        groups[group_value(r, key).value_or(kNoData)].push_back(score->value);
    }
    std::vector<SusGroup> out;
    for (const auto& [label, values] : groups) {
        SusGroup g;
        g.label = label;
        g.n = static_cast<int>(values.size());
        if (values.size() >= 2) {
            const auto stats = descriptive(values);
            g.mean = stats.mean;
            g.sd = stats.sd;
        } else {
            g.mean = values.front();
        }
        g.benchmark = scoring::sus_benchmark(g.mean);
        out.push_back(std::move(g));
    }
    std::stable_partition(out.begin(), out.end(), [](const SusGroup& g) { return g.label != kNoData; });
    return out;
}

double percent_one_decimal(int count, int total) {
    if (total <= 0) return 0.0;
    const long long tenths = (2LL * 1000 * count + total) / (2LL * total);
    return static_cast<double>(tenths) / 10.0;
}

std::string nationality_from_locale(const std::string& locale) {
    static const std::map<std::string, std::string> names = {
        {"pl", "Polish"},  {"uk", "Ukrainian"},  {"ru", "Russian"},   {"be", "Belarusian"},
        {"de", "German"},  {"cs", "Czech"},      {"sk", "Slovak"},    {"lt", "Lithuanian"},
        {"ka", "Georgian"}, {"hy", "Armenian"},  {"vi", "Vietnamese"}, {"tr", "Turkish"},
    };
    // English says nothing about nationality, so fall back to the region.
    static const std::map<std::string, std::string> regions = {
        {"US", "American"}, {"GB", "British"}, {"IE", "Irish"}, {"CA", "Canadian"}, {"AU", "Australian"},
    };
    const auto sep = locale.find_first_of("_-");
    const auto lang = locale.substr(0, sep);
    if (const auto it = names.find(lang); it != names.end()) return it->second;
    if (sep != std::string::npos)
        if (const auto it = regions.find(locale.substr(sep + 1)); it != regions.end()) return it->second;
    return locale;
}

std::vector<DemographicsRow> demographics_table(const std::vector<persistence::SessionRecord>& records) {
    using Extract = std::optional<std::string> (*)(const persistence::SessionRecord&);
    static const std::pair<const char*, Extract> fields[] = {
        {"Nationality",
         [](const persistence::SessionRecord& r) -> std::optional<std::string> {
             if (!r.profile.locale) return std::nullopt;
             return nationality_from_locale(*r.profile.locale);
         }},
        {"Country of birth", [](const persistence::SessionRecord& r) { return r.profile.hometown; }},
        {"Gender", [](const persistence::SessionRecord& r) { return r.profile.gender; }},
        {"Device", [](const persistence::SessionRecord& r) { return r.device; }},
        {"Immigrant", [](const persistence::SessionRecord& r) { return group_value(r, GroupKey::immigrant); }},
    };

    const int total = static_cast<int>(records.size());
    std::vector<DemographicsRow> out;
    for (const auto& [field, extract] : fields) {
        std::map<std::string, int> counts;
        int missing = 0;
        for (const auto& r : records) {
            if (auto v = extract(r)) ++counts[*v];
            else ++missing;
        }
        std::vector<DemographicsRow> rows;
        for (const auto& [label, n] : counts) rows.push_back({field, label, n, percent_one_decimal(n, total)});
        std::stable_sort(rows.begin(), rows.end(),
                         [](const DemographicsRow& a, const DemographicsRow& b) { return a.count > b.count; });
        if (missing > 0) rows.push_back({field, kNoData, missing, percent_one_decimal(missing, total)});
        out.insert(out.end(), rows.begin(), rows.end());
    }
    return out;
}

std::string format_ttest_text(const GroupStats& a, const GroupStats& b, const TTestResult& r) {
    auto group = [](const char* name, const GroupStats& g) {
        return std::string(name) + ": n = " + std::to_string(g.n) + ", M = " + fmt("%.2f", g.mean) +
               ", SD = " + fmt("%.2f", g.sd) + "\n";
    };
    return group("Group A", a) + group("Group B", b) + "t(" + std::to_string(r.df) + ") = " + fmt("%.3f", r.t) +
           "; critical value " + fmt("%.3f", r.critical) + " (two-tailed, alpha 0.05); " +
           (r.significant_at_05 ? "p < 0.05, significant" : "p > 0.05, not significant") + "\n";
}

std::string format_sus_text(const std::vector<SusGroup>& groups, GroupKey key) {
    std::string out = pad(std::string(to_string(key)), 16) + pad("n", 6) + pad("M", 9) + pad("SD", 9) + "vs 68\n";
    for (const auto& g : groups)
        out += pad(g.label, 16) + pad(std::to_string(g.n), 6) + pad(fmt("%.2f", g.mean), 9) +
               pad(g.sd ? fmt("%.2f", *g.sd) : "-", 9) + std::string(scoring::to_string(g.benchmark)) + "\n";
    return out;
}

std::string format_sus_csv(const std::vector<SusGroup>& groups, GroupKey key) {
    std::string out = csv_line({std::string(to_string(key)), "n", "mean", "sd", "benchmark"});
    for (const auto& g : groups)
        out += csv_line({g.label, std::to_string(g.n), fmt("%.2f", g.mean),
                         g.sd ? std::optional<std::string>(fmt("%.2f", *g.sd)) : std::nullopt,
                         std::string(scoring::to_string(g.benchmark))});
    return out;
}

std::string format_demographics_text(const std::vector<DemographicsRow>& rows, int total) {
    std::string out = "N = " + std::to_string(total) + "\n";
    std::string current;
    for (const auto& r : rows) {
        if (r.field != current) {
            out += r.field + "\n";
            current = r.field;
        }
        out += "  " + pad(r.category, 24) + pad(std::to_string(r.count), 6) + fmt("%.1f", r.percent) + "\n";
    }
    return out;
}

std::string format_demographics_csv(const std::vector<DemographicsRow>& rows) {
    std::string out = csv_line({"field", "category", "n", "percent"});
    for (const auto& r : rows) out += csv_line({r.field, r.category, std::to_string(r.count), fmt("%.1f", r.percent)});
    return out;
}

}  // namespace surveybot::analytics
