#pragma once

#include <nlohmann/json.hpp>

#include "config.hpp"

namespace rigp::cli {

/// Executes one configured run and writes its artifacts under config.out.
/// Returns the report that was written to report.json (or summary.json for
/// replicate runs). Library errors propagate as rigp::Error.
nlohmann::json run(const RunConfig& config);

}  // namespace rigp::cli
