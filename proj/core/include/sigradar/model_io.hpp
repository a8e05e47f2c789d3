#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "sigradar/model.hpp"

namespace sigradar {

/// Self-describing JSON document: algorithm tag, hyperparameters, seed,
/// standardization statistics, and the fitted state (flat weight arrays or
/// tree node lists). Doubles round-trip exactly.
std::string serialize_model(const TrainedModel& model);
TrainedModel deserialize_model(std::string_view text);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace sigradar
