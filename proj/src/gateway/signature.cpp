#include "surveybot/gateway/signature.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <stdexcept>

namespace surveybot::gateway {

namespace {

constexpr std::string_view kPrefix = "sha1=";
constexpr std::size_t kDigestHex = 40;

bool is_lower_hex(std::string_view s) {
    for (char c : s)
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
    return true;
}

}  // namespace

std::string hmac_sha1_hex(std::string_view key, std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!HMAC(EVP_sha1(), key.data(), static_cast<int>(key.size()), reinterpret_cast<const unsigned char*>(data.data()),
              data.size(), digest, &len))
        throw std::runtime_error("HMAC-SHA1 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

std::string_view to_string(SignatureCheck c) {
    switch (c) {
        case SignatureCheck::accept: return "accept";
        case SignatureCheck::malformed_header: return "malformed_header";
        case SignatureCheck::mismatch: return "mismatch";
    }
    return "?";
}

SignatureCheck verify_signature(std::string_view raw_body, std::string_view header, std::string_view app_secret) {
    if (header.substr(0, kPrefix.size()) != kPrefix) return SignatureCheck::malformed_header;
    const std::string_view presented = header.substr(kPrefix.size());
    if (presented.size() != kDigestHex || !is_lower_hex(presented)) return SignatureCheck::malformed_header;
    const std::string expected = hmac_sha1_hex(app_secret, raw_body);
    return CRYPTO_memcmp(expected.data(), presented.data(), kDigestHex) == 0 ? SignatureCheck::accept
                                                                             : SignatureCheck::mismatch;
}

std::optional<std::string> verify_subscription(const std::map<std::string, std::string>& query,
                                               std::string_view verify_token) {
    auto get = [&](const char* k) -> const std::string* {
        auto it = query.find(k);
        return it == query.end() ? nullptr : &it->second;
    };
    const auto* mode = get("hub.mode");
    const auto* token = get("hub.verify_token");
    const auto* challenge = get("hub.challenge");
    if (!mode || !token || !challenge || challenge->empty()) return std::nullopt;
    if (*mode != "subscribe" || verify_token.empty()) return std::nullopt;
    if (token->size() != verify_token.size() ||
        CRYPTO_memcmp(token->data(), verify_token.data(), verify_token.size()) != 0)
        return std::nullopt;
    return *challenge;
}

}  // namespace surveybot::gateway
