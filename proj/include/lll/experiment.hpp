#pragma once

#include <string>

#include <json.hpp>

#include "lll/graph.hpp"
#include "lll/rng.hpp"

namespace lll::experiment {

using nlohmann::json;

// Executes a config of kind oracle-suite | solver-run | pipeline | tail-bound
// across its seed list and returns the report. Unknown config fields are a
// schema error. All non-timing report content is a deterministic function of
// the config.
json run(const json& config);

// Validator with no solver state: re-runs the relevant validity scan.
// kinds: coloring | orientation | dss
json validate_output(const std::string& kind, const std::string& graph_path,
                     const std::string& artifact_path);

// Oracle batteries at a size budget (1 = smoke, larger = more cases).
json oracle_suite(int budget, uint64_t seed);

// Report with the timing subtree removed (the reproducible part).
json strip_timing(json report);

Graph graph_from_config(const json& gconf);

}  // namespace lll::experiment
