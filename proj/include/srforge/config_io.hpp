#pragma once

#include <filesystem>

#include <json.hpp>

#include "srforge/model.hpp"
#include "srforge/trainer.hpp"

namespace srforge {

/// Version stamped into every config file; readers reject any other value.
inline constexpr int kConfigSchemaVersion = 1;

// Strict JSON codecs: unknown keys, wrong types and a missing or different
// schema_version are ConfigErrors naming the offending field. Omitted keys keep
// their defaults.
nlohmann::json to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);

ModelConfig load_model_config(const std::filesystem::path& path);
TrainConfig load_train_config(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace srforge
