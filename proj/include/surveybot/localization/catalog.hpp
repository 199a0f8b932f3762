#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace surveybot {

enum class Locale { pl, uk, en };

inline constexpr std::array<Locale, 3> kAllLocales{Locale::pl, Locale::uk, Locale::en};

std::string_view to_string(Locale locale);
std::optional<Locale> parse_locale(std::string_view code);

/// Raised when a key is requested that no catalog defines. Catalogs are
/// validated at load time, so hitting this at runtime is a programming error.
class UnknownKeyError : public std::runtime_error {
public:
    UnknownKeyError(std::string key, Locale locale);
    const std::string& key() const { return key_; }
    Locale locale() const { return locale_; }

private:
    std::string key_;
    Locale locale_;
};

class CatalogParseError : public std::runtime_error {
public:
    CatalogParseError(const std::string& source, int line, const std::string& what);
    int line() const { return line_; }

private:
    int line_;
};

/// One locale's key -> text table.
///
/// File format: UTF-8, one `key=value` per line, `#` starts a comment line,
/// blank lines ignored. In values `\n` is a line break and `\\` a backslash.
class Catalog {
public:
    Catalog() = default;
    Catalog(Locale locale, std::map<std::string, std::string> entries);

    static Catalog parse(Locale locale, std::string_view text, const std::string& source = "<memory>");
    static Catalog load(Locale locale, const std::filesystem::path& path);

    Locale locale() const { return locale_; }
    const std::map<std::string, std::string>& entries() const { return entries_; }
    const std::string* find(std::string_view key) const;

private:
    Locale locale_ = Locale::en;
    std::map<std::string, std::string> entries_;
};

struct MissingEntry {
    Locale locale;
    std::string key;

    bool operator==(const MissingEntry&) const = default;
};

/// Keys present in some catalog but absent (or empty) in another.
std::vector<MissingEntry> check_completeness(const std::array<Catalog, 3>& catalogs);

class IncompleteCatalogError : public std::runtime_error {
public:
    explicit IncompleteCatalogError(std::vector<MissingEntry> missing);
    const std::vector<MissingEntry>& missing() const { return missing_; }

private:
    std::vector<MissingEntry> missing_;
};

using Params = std::map<std::string, std::string>;

/// Replaces each `{name}` in `pattern` with `params.at(name)`; unknown
/// placeholders are left untouched.
std::string fill(std::string_view pattern, const Params& params);

/// The three validated catalogs. Immutable after construction.
///
/// Keys ending in `.trilingual` are virtual: they resolve to the base key's
/// text in every locale (pl, uk, en order) separated by a blank line, and
/// give the same result whatever locale is asked for. They are used before
/// the respondent has picked a language.
class CatalogSet {
public:
    static constexpr std::string_view kTrilingualSuffix = ".trilingual";

    /// Throws IncompleteCatalogError unless all key sets match.
    explicit CatalogSet(std::array<Catalog, 3> catalogs);

    static CatalogSet load_directory(const std::filesystem::path& dir, std::string_view stem = "catalog");

    const Catalog& catalog(Locale locale) const;
    bool contains(std::string_view key) const;

    std::string resolve(std::string_view key, Locale locale) const;
    std::string render(std::string_view key, Locale locale, const Params& params) const {
        return fill(resolve(key, locale), params);
    }

private:
    std::array<Catalog, 3> catalogs_;
};

}  // namespace surveybot
