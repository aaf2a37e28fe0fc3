#pragma once

// Batch driver: runs every (scenario x algorithm x k_percent) combination
// of a grid, collects one row per run, and serializes the table as CSV.
// Rows keep grid order (scenario-major, then algorithm, then k) regardless
// of how many worker threads execute the runs, so output is deterministic.

#include <optional>
#include <string>
#include <vector>

#include "ticp/pipeline.hpp"

namespace ticp {

struct SweepSpec {
    std::vector<AlgorithmSpec> algorithms;
    std::vector<double> k_percents = {5, 10, 25, 50, 75};
    std::vector<std::string> scenario_paths;  // manifest files
    RegistrationConfig base;                  // per-combo fields overwritten
    // Trim fraction for every run; unset picks 0.1 for hole-tagged
    // scenarios (their source keeps points with no surviving partner) and
    // 0 otherwise.
    std::optional<double> tau;
    int jobs = 1;
};

struct SweepRow {
    std::string scenario;   // scenario tag from the manifest
    std::string algorithm;  // canonical name, e.g. icp-lie-0
    std::string strategy;   // "-", "0" or "1"
    double k_percent = 0.0;
    double final_mrms = 0.0;
    int iterations = 0;
    bool ok = false;
    std::string status;  // "ok" or the failure text
    std::string best;    // "", "0", "1" or "0;1"
};

// Runs the grid; never throws for individual run failures (they land in
// the status column). Throws std::invalid_argument for an empty grid.
std::vector<SweepRow> sweep_grid(const SweepSpec& spec);

// Header + one line per row; numbers at 15 significant digits.
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace ticp
