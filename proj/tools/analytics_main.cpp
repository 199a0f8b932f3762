#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "surveybot/analytics/reports.hpp"
#include "surveybot/persistence/csv.hpp"
#include "surveybot/persistence/storage.hpp"

namespace {

using namespace surveybot;

analytics::GroupStats parse_group(const std::vector<double>& v, const char* name) {
    if (v.size() != 3) throw std::invalid_argument(std::string(name) + " takes n mean sd");
    if (v[0] != static_cast<int>(v[0])) throw std::invalid_argument(std::string(name) + ": n must be an integer");
    return {static_cast<int>(v[0]), v[1], v[2]};
}

std::vector<persistence::SessionRecord> read_records(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return persistence::records_from_csv(ss.str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evaluation statistics over survey exports"};
    app.require_subcommand(1);

    std::vector<double> a, b, a_values, b_values;
    auto* ttest = app.add_subcommand("ttest", "Pooled Student t-test for two independent groups");
    auto* oa = ttest->add_option("--a", a, "Group A summary: n mean sd")->expected(3);
    auto* ob = ttest->add_option("--b", b, "Group B summary: n mean sd")->expected(3);
    auto* va = ttest->add_option("--a-values", a_values, "Group A raw values")->delimiter(',');
    auto* vb = ttest->add_option("--b-values", b_values, "Group B raw values")->delimiter(',');
    oa->excludes(va);
    ob->excludes(vb);

    std::string csv_path, format = "text";
    bool finalized_only = false;
    auto* report = app.add_subcommand("report", "Demographics and SUS by device and migration experience");
    report->add_option("--csv", csv_path, "Export produced by `analytics export`")->required()->check(CLI::ExistingFile);
    report->add_option("--format", format, "text or csv")->check(CLI::IsMember({"text", "csv"}));

    std::string storage_path, out_path, language;
    auto* exp = app.add_subcommand("export", "Write stored records as CSV");
    exp->add_option("--storage", storage_path, "SQLite file")->required()->check(CLI::ExistingFile);
    exp->add_option("-o,--out", out_path, "Output file (default stdout)");
    exp->add_flag("--finalized-only", finalized_only, "Only completed sessions");
    exp->add_option("--language", language, "pl, uk or en")->check(CLI::IsMember({"pl", "uk", "en"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ttest) {
            const auto ga = a_values.empty() ? parse_group(a, "--a") : analytics::descriptive(a_values);
            const auto gb = b_values.empty() ? parse_group(b, "--b") : analytics::descriptive(b_values);
            std::cout << analytics::format_ttest_text(ga, gb, analytics::student_t_independent(ga, gb));
            return 0;
        }
        if (*report) {
            const auto records = read_records(csv_path);
            const auto demo = analytics::demographics_table(records);
            const auto by_device = analytics::sus_summary(records, analytics::GroupKey::device);
            const auto by_immigrant = analytics::sus_summary(records, analytics::GroupKey::immigrant);
            if (format == "csv") {
                std::cout << analytics::format_demographics_csv(demo) << "\r\n"
                          << analytics::format_sus_csv(by_device, analytics::GroupKey::device) << "\r\n"
                          << analytics::format_sus_csv(by_immigrant, analytics::GroupKey::immigrant);
            } else {
                std::cout << analytics::format_demographics_text(demo, static_cast<int>(records.size())) << "\nSUS\n"
                          << analytics::format_sus_text(by_device, analytics::GroupKey::device) << "\n"
                          << analytics::format_sus_text(by_immigrant, analytics::GroupKey::immigrant);
            }
            return 0;
        }
        if (*exp) {
            persistence::SqliteStorage storage(storage_path);
            persistence::RecordFilter filter;
            filter.finalized_only = finalized_only;
            if (!language.empty()) filter.language = parse_locale(language);
            const std::string csv = storage.export_csv(filter);
            if (out_path.empty()) std::cout << csv;
            else std::ofstream(out_path, std::ios::binary) << csv;
            return 0;
        }
    } catch (const analytics::TooFewError& e) {
        std::cerr << "TOO_FEW: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
