#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fermiflux/flows.hpp"
#include "fermiflux/types.hpp"

namespace fermiflux {

struct IntegrationOptions {
    double rtol = 1e-9;                    // allowed range [1e-12, 1e-3]
    double t_end = 1e12;
    int n_samples = 2000;
    double equilibrium_threshold = 1e-12;  // fraction of the initial rate scales
    long max_steps = 50'000'000;

    void validate() const;
};

enum class EventKind {
    temperature_order_swap,
    chemical_potential_order_swap,
    crossover_sign_change,
    crossover_singularity,
    mode_crossover_entry,
};

const char* to_string(EventKind kind);

struct Event {
    EventKind kind;
    double time;
    int first;    // reservoir indices of the pair, 0-based
    int second;
    // pair state at the bisected instant
    double temperature_first = 0.0;
    double temperature_second = 0.0;
    double mu_first = 0.0;
    double mu_second = 0.0;
    double crossover = 0.0;  // NaN when singular
};

struct TrajectoryPoint {
    double time = 0.0;
    std::vector<double> temperature;
    std::vector<double> chemical_potential;
    std::vector<double> x;
    FlowSet flows;
    std::vector<double> crossover;  // per pair (a<b) in row order; NaN = singular
    double total_n = 0.0;
    double total_e = 0.0;
};

struct Trajectory {
    std::size_t n_reservoirs = 0;
    std::vector<TrajectoryPoint> steps;    // accepted integrator steps
    std::vector<TrajectoryPoint> samples;  // uniform time grid, first row exactly t=0
    std::vector<Event> events;

    bool reached_equilibrium = false;
    double t_final = 0.0;
    long n_accepted = 0;
    long n_rejected = 0;
    double accumulated_error_estimate = 0.0;

    int coldest = 0;                // reservoir with the lowest initial T
    double min_cold_ratio = 1.0;    // min_t T_cold(t) / T_cold(0)

    const TrajectoryPoint& final_point() const { return steps.back(); }
};

/// Integrate the (T_j, x_j) system until t_end or until sigma and every
/// |dT/dt|, |dx/dt| fall below equilibrium_threshold of their initial
/// magnitudes. Second law, conservation of the totals and the validity
/// domain are enforced at every accepted step (IntegrityError,
/// SommerfeldDomainError).
Trajectory integrate(const SystemSpec& sys, std::span<const ReservoirState> initial,
                     const IntegrationOptions& opts = {});

/// Sign-change monitors over the accepted-step sequence. A sign only counts
/// once the monitor has left a noise band of 1e3 * rtol * scale, so the
/// integration noise around a converged crossing cannot flood the log;
/// transitions between confirmed signs are bisected on the dense output.
/// Exposed separately so synthetic trajectories can drive it.
class EventDetector {
public:
    EventDetector(const SystemSpec& sys, std::size_t n_reservoirs, double rtol);

    /// Dense evaluator: fills y = [T_0, x_0, T_1, x_1, ...] at time t.
    /// Must cover at least the span between two observe() calls.
    using DenseEval = std::function<void(double t, std::span<double> y)>;

    /// Confirm initial signs from the starting state.
    void prime(double t0, std::span<const double> y0);

    /// Feed one accepted step's end state; appends localized events.
    void observe(double t, std::span<const double> y, const DenseEval& dense,
                 std::vector<Event>& out);

private:
    struct Monitor {
        int kind;  // 0 dT, 1 dmu, 2 crossover numerator, 3 inside-mode-window
        int a, b;
        int confirmed = 0;
        double t_confirmed = 0.0;
    };
    double value(const Monitor& m, std::span<const double> y) const;
    double band(const Monitor& m, std::span<const double> y) const;

    double omega_min_, omega_max_;
    std::size_t n_;
    double rtol_;
    std::vector<Monitor> monitors_;
    mutable std::vector<double> scratch_;
};

struct ModeRelaxation {
    std::vector<double> times;
    std::vector<std::vector<double>> occupancy;  // [time][mode]
    std::vector<double> rate;                    // sum_j gamma_j(w_k)
    std::vector<double> fixed_point;             // n~(w_k)
};

/// Fast-timescale oracle: relax mode occupations toward n~ for frozen
/// reservoir states, d<n_k>/dt = sum_j gamma_j(w_k)(n_j(w_k) - <n_k>).
/// duration 0 picks several multiples of the slowest mode's 1/rate.
ModeRelaxation mode_occupation_relaxation(const SystemSpec& sys,
                                          std::span<const ReservoirState> reservoirs,
                                          std::span<const double> n0,
                                          double duration = 0.0,
                                          int n_samples = 200);

}  // namespace fermiflux
