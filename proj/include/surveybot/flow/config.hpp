#pragma once

#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "surveybot/flow/types.hpp"

namespace surveybot::flow {

enum class ConfigErrorCode { schema_error, missing_translation, bad_count };

std::string_view to_string(ConfigErrorCode code);

/// A rejected flow document. `position()` is a JSON pointer into the
/// document (or "file:line" for catalog files).
class ConfigError : public std::runtime_error {
public:
    ConfigError(ConfigErrorCode code, std::string position, const std::string& message);
    ConfigErrorCode code() const { return code_; }
    const std::string& position() const { return position_; }

private:
    ConfigErrorCode code_;
    std::string position_;
};

/// Validates a flow document against already-loaded catalogs.
FlowDefinition load_flow(const nlohmann::json& doc, std::shared_ptr<const CatalogSet> catalogs);

/// Loads catalogs named in the document's "catalogs" object, relative to base_dir.
FlowDefinition load_flow(const nlohmann::json& doc, const std::filesystem::path& base_dir);

FlowDefinition load_flow_file(const std::filesystem::path& path);

}  // namespace surveybot::flow
