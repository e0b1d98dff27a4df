#pragma once

#include "config.hpp"
#include "json.hpp"

namespace margin::cli {

/// `fit counts`: reads the CountSeries CSV at config.input, fits the salient
/// rate model with a beta discrepancy and writes report plus marginals.
nlohmann::json run_fit(const RunConfig& config);

}  // namespace margin::cli
