#include "surveybot/localization/catalog.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "surveybot/localization/text.hpp"

namespace surveybot {

std::string_view to_string(Locale locale) {
    switch (locale) {
        case Locale::pl: return "pl";
        case Locale::uk: return "uk";
        case Locale::en: return "en";
    }
    return "?";
}

std::optional<Locale> parse_locale(std::string_view code) {
    if (code == "pl") return Locale::pl;
    if (code == "uk") return Locale::uk;
    if (code == "en") return Locale::en;
    return std::nullopt;
}

UnknownKeyError::UnknownKeyError(std::string key, Locale locale)
    : std::runtime_error("unknown catalog key '" + key + "' for locale " + std::string(to_string(locale))),
      key_(std::move(key)),
      locale_(locale) {}

CatalogParseError::CatalogParseError(const std::string& source, int line, const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::string unescape(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == '\\' && i + 1 < raw.size()) {
            const char next = raw[i + 1];
            if (next == 'n') {
                out.push_back('\n');
                ++i;
                continue;
            }
            if (next == '\\') {
                out.push_back('\\');
                ++i;
                continue;
            }
        }
        out.push_back(raw[i]);
    }
    return out;
}

std::string describe(const std::vector<MissingEntry>& missing) {
    std::ostringstream os;
    os << "catalogs incomplete:";
    for (const auto& m : missing) os << ' ' << to_string(m.locale) << ':' << m.key;
    return os.str();
}

}  // namespace

Catalog::Catalog(Locale locale, std::map<std::string, std::string> entries)
    : locale_(locale), entries_(std::move(entries)) {}

Catalog Catalog::parse(Locale locale, std::string_view text, const std::string& source) {
    std::map<std::string, std::string> entries;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        const std::string_view stripped = text::trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) throw CatalogParseError(source, line_no, "expected key=value");
        std::string key(text::trim(line.substr(0, eq)));
        if (key.empty()) throw CatalogParseError(source, line_no, "empty key");
        if (entries.contains(key)) throw CatalogParseError(source, line_no, "duplicate key '" + key + "'");
        entries.emplace(std::move(key), unescape(text::trim(line.substr(eq + 1))));
    }
    return Catalog(locale, std::move(entries));
}

Catalog Catalog::load(Locale locale, const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open catalog " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(locale, buf.str(), path.string());
}

const std::string* Catalog::find(std::string_view key) const {
    const auto it = entries_.find(std::string(key));
    return it == entries_.end() ? nullptr : &it->second;
}

std::vector<MissingEntry> check_completeness(const std::array<Catalog, 3>& catalogs) {
    std::set<std::string> all_keys;
    for (const auto& c : catalogs)
        for (const auto& [key, _] : c.entries()) all_keys.insert(key);

    std::vector<MissingEntry> missing;
    for (const auto& c : catalogs) {
        for (const auto& key : all_keys) {
            const std::string* value = c.find(key);
            if (value == nullptr || text::trim(*value).empty()) missing.push_back({c.locale(), key});
        }
    }
    return missing;
}

IncompleteCatalogError::IncompleteCatalogError(std::vector<MissingEntry> missing)
    : std::runtime_error(describe(missing)), missing_(std::move(missing)) {}

std::string fill(std::string_view pattern, const Params& params) {
    std::string out;
    out.reserve(pattern.size());
    std::size_t i = 0;
    while (i < pattern.size()) {
        if (pattern[i] == '{') {
            const std::size_t close = pattern.find('}', i + 1);
            if (close != std::string_view::npos) {
                const auto it = params.find(std::string(pattern.substr(i + 1, close - i - 1)));
                if (it != params.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out.push_back(pattern[i++]);
    }
    return out;
}

CatalogSet::CatalogSet(std::array<Catalog, 3> catalogs) : catalogs_(std::move(catalogs)) {
    for (std::size_t i = 0; i < kAllLocales.size(); ++i) {
        if (catalogs_[i].locale() != kAllLocales[i])
            throw std::invalid_argument("catalogs must be ordered pl, uk, en");
    }
    if (auto missing = check_completeness(catalogs_); !missing.empty())
        throw IncompleteCatalogError(std::move(missing));
}

CatalogSet CatalogSet::load_directory(const std::filesystem::path& dir, std::string_view stem) {
    std::array<Catalog, 3> catalogs;
    for (std::size_t i = 0; i < kAllLocales.size(); ++i) {
        const Locale l = kAllLocales[i];
        catalogs[i] = Catalog::load(l, dir / (std::string(stem) + "." + std::string(to_string(l)) + ".txt"));
    }
    return CatalogSet(std::move(catalogs));
}

const Catalog& CatalogSet::catalog(Locale locale) const {
    return catalogs_[static_cast<std::size_t>(locale)];
}

bool CatalogSet::contains(std::string_view key) const {
    if (key.ends_with(kTrilingualSuffix)) key.remove_suffix(kTrilingualSuffix.size());
    // Key sets are identical across locales (checked in the constructor).
    return catalogs_[0].find(key) != nullptr;
}

std::string CatalogSet::resolve(std::string_view key, Locale locale) const {
    if (key.ends_with(kTrilingualSuffix)) {
        const std::string_view base = key.substr(0, key.size() - kTrilingualSuffix.size());
        std::string out;
        for (const auto& c : catalogs_) {
            const std::string* value = c.find(base);
            if (value == nullptr) throw UnknownKeyError(std::string(key), c.locale());
            if (!out.empty()) out += "\n\n";
            out += *value;
        }
        return out;
    }
    const std::string* value = catalog(locale).find(key);
    if (value == nullptr) throw UnknownKeyError(std::string(key), locale);
    return *value;
}

}  // namespace surveybot
