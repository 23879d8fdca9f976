#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "relbc/config.hpp"

namespace relbc {

struct Report {
    nlohmann::ordered_json json;
    std::string table;
};

// Executes the configured honest repetitions and renders the per-run table
// (bit committed/deduced, errors, single-photon bounds, timings) plus the
// binding bound for the configured thresholds.
Report make_run_report(const RunConfig& cfg);

// Binding bound for the configured security parameters; optional N_tol sweep.
Report make_bound_report(const RunConfig& cfg);

// Geometry quantities for the configured layout and timing observations.
Report make_geometry_report(const RunConfig& cfg);

// Runs the configured attack and reports the measured success statistics.
Report make_attack_report(const RunConfig& cfg);

}  // namespace relbc
