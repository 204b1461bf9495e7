#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fermiflux/output.hpp"
#include "fermiflux/scenario.hpp"

namespace fermiflux {

/// Run one scenario and write trajectory.csv / events.json / summary.json
/// (and the SVG plots when selected) into out_dir. On integration failure the
/// partial outputs are flushed before the error propagates.
RunSummary run_scenario(const Scenario& sc, const std::filesystem::path& out_dir);

/// Result of one scenario run plus the trajectory, for callers that want the
/// numbers without touching the filesystem.
struct RunResult {
    RunSummary summary;
    Trajectory trajectory;
};
RunResult run_scenario_in_memory(const Scenario& sc);

/// Cartesian sweep grid over scalar scenario fields addressed by path, e.g.
///   reservoir[2].chemical_potential = 16.0 17.0 18.0
///   integration.rtol = 1e-9 1e-10
struct SweepGrid {
    struct Axis {
        std::string path;
        std::vector<double> values;
    };
    std::vector<Axis> axes;

    std::size_t n_points() const;
};

SweepGrid load_grid(const std::filesystem::path& path);

/// Set a scalar scenario field by path (1-based reservoir / mode indices).
void apply_scalar(Scenario& sc, const std::string& path, double value);

/// Run every grid point on a bounded worker pool; one row per point in
/// sweep.csv. Per-point failures are recorded in the row and the sweep
/// continues. Returns the number of failed points.
int sweep(const Scenario& base, const SweepGrid& grid, const std::filesystem::path& out_dir,
          int jobs);

}  // namespace fermiflux
