#pragma once

#include <json.hpp>

#include "nws/trainer.hpp"

namespace nws {

// JSON round-trip for the run configuration and the comparison report.
// Unknown keys are rejected so a manifest always reproduces its run.
nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CompareReport& report);

}  // namespace nws
