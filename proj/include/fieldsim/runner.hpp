#pragma once

#include "fieldsim/config.hpp"

#include <iosfwd>
#include <string>

namespace fieldsim::run {

struct RunOptions {
    std::string output_dir = ".";
    bool trace_deps = false;
    bool dump_kernel = false;
    std::ostream* out = nullptr; // kernel dumps and dep traces; default std::cout
};

struct RunSummary {
    double t_final = 0.0;
    long steps_accepted = 0;
    long steps_rejected = 0;
    long rows_written = 0;
    bool stopped_by_torque = false;
    std::string observables_path; // as written
};

/// Wire the configured system, integrate, and write observables (and
/// snapshots when enabled). Deterministic given the config.
RunSummary run_simulation(const SimConfig& cfg, const RunOptions& opts = {});

} // namespace fieldsim::run
