#pragma once

#include <iosfwd>
#include <string>

#include "fermiflux/dynamics.hpp"
#include "fermiflux/equilibrium.hpp"
#include "fermiflux/scenario.hpp"

namespace fermiflux {

/// Lossless decimal rendering of a double (17 significant digits).
std::string format_g17(double value);

/// Columns: t, then per reservoir T_j, mu_j, x_j, J_j, P_j, Y_j, then sigma,
/// sum_N, sum_E, omega_tilde per pair (nan = singular). Writes the uniform
/// sample grid.
void write_trajectory_csv(std::ostream& os, const SystemSpec& sys, const Trajectory& traj);

void write_events_json(std::ostream& os, const Trajectory& traj);

struct RunSummary {
    std::string scenario;
    bool flows_check = false;

    // flows-check fields
    double heat_flow_sum = 0.0;
    double clausius_sum = 0.0;   // sum_j Y_j / T_j
    double sigma = 0.0;

    // dynamics fields
    double t_final = 0.0;
    bool reached_equilibrium = false;
    double teq_solver = 0.0;
    double mueq_solver = 0.0;
    double equilibrium_residual = 0.0;
    double teq_trajectory = 0.0;     // max-deviation reservoir at t_final
    double mueq_trajectory = 0.0;
    double trajectory_vs_solver = 0.0;  // max relative mismatch over reservoirs
    int coldest_reservoir = 0;          // 1-based
    double min_cold_ratio = 1.0;
    double drift_n = 0.0;
    double drift_e = 0.0;
    double sigma_initial = 0.0;
    double sigma_final = 0.0;
    double min_sigma = 0.0;
    long n_steps = 0;
    int n_events = 0;
    bool single_mode_flagged = false;
    double wall_seconds = 0.0;
};

void write_summary_json(std::ostream& os, const RunSummary& s);

/// Static SVG line charts mirroring the reference layout: solid trajectories,
/// dot-dashed equilibrium asymptote, dotted crossover frequency, dashed mode
/// lines (mu plot only).
void write_temperature_plot(std::ostream& os, const SystemSpec& sys, const Trajectory& traj,
                            double teq);
void write_chemical_potential_plot(std::ostream& os, const SystemSpec& sys,
                                   const Trajectory& traj, double mueq);

}  // namespace fermiflux
