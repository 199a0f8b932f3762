#include "surveybot/gateway/profile.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <charconv>
#include <fstream>

namespace surveybot::gateway {

using nlohmann::json;

namespace {

std::optional<std::string> opt_string(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string()) return std::nullopt;
    auto s = j[key].get<std::string>();
    if (s.empty()) return std::nullopt;
    return s;
}

std::optional<double> parse_offset(const json& v) {
    if (v.is_number()) return v.get<double>();
    if (!v.is_string()) return std::nullopt;
    std::string s = v.get<std::string>();
    if (!s.empty() && s.front() == '+') s.erase(0, 1);
    double d = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
    if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    return d;
}

}  // namespace

ProfileAttributes fetch_profile(ProfileProvider& provider, const std::string& user_id) {
    try {
        return provider.fetch(user_id);
    } catch (const std::exception& e) {
        spdlog::warn("profile fetch for {} failed: {}", user_id, e.what());
        return {};
    }
}

ProfileAttributes profile_from_json(const json& j) {
    ProfileAttributes p;
    if (!j.is_object()) return p;
    p.first_name = opt_string(j, "first_name");
    p.last_name = opt_string(j, "last_name");
    p.locale = opt_string(j, "locale");
    p.birthday = opt_string(j, "birthday");
    p.gender = opt_string(j, "gender");
    p.profile_pic = opt_string(j, "profile_pic");
    if (j.contains("timezone")) p.timezone = parse_offset(j["timezone"]);
    if (j.contains("hometown")) {
        const auto& h = j["hometown"];
        if (h.is_string() && !h.get<std::string>().empty()) p.hometown = h.get<std::string>();
        else if (h.is_object()) p.hometown = opt_string(h, "name");
    }
    return p;
}

FixtureProfileProvider::FixtureProfileProvider(const json& fixture) {
    if (!fixture.is_object()) throw std::invalid_argument("profile fixture must be an object keyed by user id");
    for (const auto& [id, value] : fixture.items()) profiles_[id] = profile_from_json(value);
}

FixtureProfileProvider FixtureProfileProvider::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return FixtureProfileProvider(json::parse(in));
}

ProfileAttributes FixtureProfileProvider::fetch(const std::string& user_id) {
    if (auto it = profiles_.find(user_id); it != profiles_.end()) return it->second;
    if (auto it = profiles_.find("*"); it != profiles_.end()) return it->second;
    return {};
}

std::pair<std::string, std::string> split_base_url(const std::string& url) {
    const auto scheme = url.find("://");
    const auto path_start = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (path_start == std::string::npos) return {url, ""};
    std::string path = url.substr(path_start);
    while (!path.empty() && path.back() == '/') path.pop_back();
    return {url.substr(0, path_start), path};
}

GraphProfileProvider::GraphProfileProvider(std::string base_url, std::string page_token)
    : base_url_(std::move(base_url)), page_token_(std::move(page_token)) {}

ProfileAttributes GraphProfileProvider::fetch(const std::string& user_id) {
    const auto [host, prefix] = split_base_url(base_url_);
    httplib::Client client(host);
    client.set_connection_timeout(5);
    client.set_read_timeout(10);
    httplib::Params params{{"fields", "first_name,last_name,locale,timezone,gender,profile_pic,birthday,hometown"},
                           {"access_token", page_token_}};
    auto res = client.Get(prefix + "/" + httplib::detail::encode_url(user_id), params, httplib::Headers{});
    if (!res) throw std::runtime_error("profile request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw std::runtime_error("profile request returned HTTP " + std::to_string(res->status));
    return profile_from_json(json::parse(res->body));
}

}  // namespace surveybot::gateway
