#pragma once

#include <json.hpp>

#include "tpd/config.hpp"

namespace tpd::detail {

nlohmann::json config_to_json_value(const RunConfig& config);
RunConfig config_from_json_value(const nlohmann::json& j);

}  // namespace tpd::detail
