#pragma once

#include "fcs/model.hpp"

#include <json.hpp>

#include <string>

namespace fcs {

inline constexpr int kModelFormatVersion = 1;

nlohmann::ordered_json model_to_json(const FcsModel& model);
FcsModel model_from_json(const nlohmann::json& doc);

// Pretty-printed JSON document, trailing newline. Numeric fields survive a
// round trip bit-identically (shortest round-trip float formatting).
std::string serialize_model(const FcsModel& model);
FcsModel deserialize_model(const std::string& text);

FcsModel load_model(const std::string& path);
void save_model(const FcsModel& model, const std::string& path);

}  // namespace fcs
