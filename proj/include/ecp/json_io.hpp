#pragma once

#include <json.hpp>

#include "ecp/cavity.hpp"
#include "ecp/protocol.hpp"
#include "ecp/stochastic.hpp"

namespace ecp {

// Stable JSON views of the report types. Complex numbers are [re, im]
// pairs; objects use fixed field names so emitted documents are
// byte-stable for identical inputs.
nlohmann::json to_json(const FaradayPhases& phases);
nlohmann::json to_json(const PureState& state);
nlohmann::json to_json(const RoundOutcome& outcome);
nlohmann::json to_json(const ProtocolConfig& config);
nlohmann::json to_json(const ProtocolReport& report);
nlohmann::json to_json(const EmpiricalReport& report);
nlohmann::json to_json(const ConvergenceResult& result);

}  // namespace ecp
