#pragma once

#include <string>

#include "finger/patient.hpp"

namespace finger::defaults {

/// Versioned defaults document: every trial-calibrated constant in one
/// auditable place. Override via --params.
const std::string& defaults_json();

/// Outcome model from a params JSON document ("outcome_model" object),
/// falling back to the built-in defaults for missing cells.
patient::OutcomeModelParams outcome_params_from_json(const std::string& json_text);

}  // namespace finger::defaults
