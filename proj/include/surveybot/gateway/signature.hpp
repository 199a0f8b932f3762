#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace surveybot::gateway {

/// Lowercase hex HMAC-SHA1.
std::string hmac_sha1_hex(std::string_view key, std::string_view data);

enum class SignatureCheck { accept, malformed_header, mismatch };

std::string_view to_string(SignatureCheck c);

/// Checks an "X-Hub-Signature: sha1=<hex>" header against the raw body,
/// comparing digests in constant time.
SignatureCheck verify_signature(std::string_view raw_body, std::string_view header, std::string_view app_secret);

/// The challenge to echo, or nullopt for a 403.
std::optional<std::string> verify_subscription(const std::map<std::string, std::string>& query,
                                               std::string_view verify_token);

}  // namespace surveybot::gateway
