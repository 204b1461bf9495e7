#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fermiflux/equilibrium.hpp"
#include "fermiflux/output.hpp"
#include "fermiflux/random_states.hpp"
#include "fermiflux/runner.hpp"
#include "fermiflux/scenario.hpp"
#include "fermiflux/verify.hpp"

namespace {

void print_run_summary(const fermiflux::RunSummary& s) {
    using fermiflux::format_g17;
    if (s.flows_check) {
        std::cout << "scenario " << s.scenario << " (flows check)\n"
                  << "  sum_Y        = " << format_g17(s.heat_flow_sum) << "\n"
                  << "  sum_Y_over_T = " << format_g17(s.clausius_sum) << "\n"
                  << "  sigma        = " << format_g17(s.sigma) << "\n";
        return;
    }
    std::cout << "scenario " << s.scenario << "\n"
              << "  t_final            = " << format_g17(s.t_final)
              << (s.reached_equilibrium ? "  (equilibrium reached)" : "  (t_end hit)") << "\n"
              << "  T_eq  solver       = " << format_g17(s.teq_solver) << "\n"
              << "  mu_eq solver       = " << format_g17(s.mueq_solver) << "\n"
              << "  trajectory vs solver (max rel) = " << format_g17(s.trajectory_vs_solver)
              << "\n"
              << "  min_t T_cold/T_cold(0) = " << format_g17(s.min_cold_ratio) << " (reservoir "
              << s.coldest_reservoir << ")\n"
              << "  drift: dN/N = " << format_g17(s.drift_n)
              << ", dE/E = " << format_g17(s.drift_e) << "\n"
              << "  sigma: initial " << format_g17(s.sigma_initial) << ", final "
              << format_g17(s.sigma_final) << ", min " << format_g17(s.min_sigma) << "\n"
              << "  steps " << s.n_steps << ", events " << s.n_events << ", wall "
              << s.wall_seconds << " s\n";
    if (s.single_mode_flagged)
        std::cout << "  note: single-mode system; the equilibrium uniqueness argument"
                     " does not apply\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fermiflux - quasi-stationary thermodynamics of fermionic reservoirs"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir, grid_path;
    double rtol = 0.0, t_end = 0.0;
    int samples = 0, jobs = 0, states = 10000;
    bool plots = false;

    auto* run = app.add_subcommand("run", "integrate one scenario and write outputs");
    run->add_option("--scenario", scenario_path, "scenario file")->required();
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--rtol", rtol, "override integration rtol");
    run->add_option("--t-end", t_end, "override integration end time");
    run->add_option("--samples", samples, "override sample count");
    run->add_flag("--plots", plots, "emit plot_T.svg and plot_mu.svg");

    auto* sweep_cmd = app.add_subcommand("sweep", "run a scalar parameter grid");
    sweep_cmd->add_option("--scenario", scenario_path, "base scenario file")->required();
    sweep_cmd->add_option("--grid", grid_path, "grid file: path = v1 v2 ...")->required();
    sweep_cmd->add_option("--out", out_dir, "output directory")->required();
    sweep_cmd->add_option("--jobs", jobs, "worker pool size (default: hardware)");

    auto* eq = app.add_subcommand("equilibrium", "print T_eq and mu_eq for a scenario");
    eq->add_option("--scenario", scenario_path, "scenario file")->required();

    auto* verify_cmd =
        app.add_subcommand("verify", "run the invariant suite on random states");
    verify_cmd->add_option("--states", states, "number of random states (default 10000)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            fermiflux::Scenario sc = fermiflux::load_scenario(scenario_path);
            if (rtol > 0.0) sc.integration.rtol = rtol;
            if (t_end > 0.0) sc.integration.t_end = t_end;
            if (samples > 0) sc.integration.n_samples = samples;
            if (plots) sc.output.plots = true;
            sc.validate();
            const auto summary = fermiflux::run_scenario(sc, out_dir);
            print_run_summary(summary);
            return 0;
        }
        if (*sweep_cmd) {
            const fermiflux::Scenario sc = fermiflux::load_scenario(scenario_path);
            const fermiflux::SweepGrid grid = fermiflux::load_grid(grid_path);
            const int failures = fermiflux::sweep(sc, grid, out_dir, jobs);
            std::cout << "sweep: " << grid.n_points() << " points, " << failures
                      << " failed; results in " << out_dir << "/sweep.csv\n";
            return 0;
        }
        if (*eq) {
            const fermiflux::Scenario sc = fermiflux::load_scenario(scenario_path);
            if (sc.flows_check) {
                std::cerr << "equilibrium: flows-check scenarios have no equilibrium\n";
                return 2;
            }
            const auto point = fermiflux::solve_equilibrium(sc.reservoirs);
            std::cout << "T_eq = " << fermiflux::format_g17(point.temperature) << "\n"
                      << "mu_eq = " << fermiflux::format_g17(point.chemical_potential) << "\n";
            return 0;
        }
        if (*verify_cmd) {
            const std::uint64_t seed = fermiflux::seed_from_environment();
            std::cout << "seed " << seed << ", " << states << " random states\n";
            const auto report = fermiflux::run_verification(seed, states, &std::cout);
            std::cout << (report.ok() ? "all" : "FAILED:") << " " << report.checks
                      << " checks, " << report.failures << " failures\n";
            return report.ok() ? 0 : 4;
        }
    } catch (const fermiflux::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
