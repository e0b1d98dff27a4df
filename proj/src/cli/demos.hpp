#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "json.hpp"

namespace margin::cli {

const std::vector<std::string>& demo_names();

/// Runs one demo, writing its artifacts and manifest.json under config.out_dir.
/// Returns the manifest. Throws UsageError, DomainError or NumericError.
nlohmann::json run_demo(const RunConfig& config);

}  // namespace margin::cli
