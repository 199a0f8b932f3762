#pragma once

#include <nlohmann/json.hpp>

#include "surveybot/flow/types.hpp"

namespace surveybot::flow {

nlohmann::json session_to_json(const Session& s);
/// Throws nlohmann::json::exception or std::invalid_argument on malformed input.
Session session_from_json(const nlohmann::json& j);

nlohmann::json message_to_json(const OutboundMessage& m);

}  // namespace surveybot::flow
