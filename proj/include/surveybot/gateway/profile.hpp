#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "surveybot/persistence/record.hpp"

namespace surveybot::gateway {

using persistence::ProfileAttributes;

class ProfileProvider {
public:
    virtual ~ProfileProvider() = default;
    /// May throw on provider errors.
    virtual ProfileAttributes fetch(const std::string& user_id) = 0;
};

/// Never throws: provider errors are logged and yield empty attributes.
ProfileAttributes fetch_profile(ProfileProvider& provider, const std::string& user_id);

/// Reads a Graph user object. Timezone may be a number or a string like "+2.0";
/// hometown may be a string or an object with a name.
ProfileAttributes profile_from_json(const nlohmann::json& j);

/// Profiles from a JSON object keyed by user id; the key "*" is the fallback
/// for unknown users. Users with no entry get empty attributes.
class FixtureProfileProvider : public ProfileProvider {
public:
    explicit FixtureProfileProvider(const nlohmann::json& fixture);
    static FixtureProfileProvider from_file(const std::filesystem::path& path);

    ProfileAttributes fetch(const std::string& user_id) override;

private:
    std::map<std::string, ProfileAttributes> profiles_;
};

/// GET {base_url}/{user_id}?fields=...&access_token=... against the Graph API.
class GraphProfileProvider : public ProfileProvider {
public:
    GraphProfileProvider(std::string base_url, std::string page_token);
    ProfileAttributes fetch(const std::string& user_id) override;

private:
    std::string base_url_;
    std::string page_token_;
};

/// "https://host:port/v15.0" -> {"https://host:port", "/v15.0"}.
std::pair<std::string, std::string> split_base_url(const std::string& url);

}  // namespace surveybot::gateway
