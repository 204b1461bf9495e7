#pragma once

#include <span>
#include <vector>

#include "fermiflux/types.hpp"

namespace fermiflux {

/// Q_alpha(x) = x^alpha + (pi^2/6) alpha (alpha-1) x^(alpha-2).
double sommerfeld_q(double alpha, double x);

/// N = B Q_alpha(x) T^alpha. Throws SommerfeldDomainError below x_min.
double particle_count(const ReservoirState& r);

/// E = B alpha/(alpha+1) (x^(alpha+1) + (pi^2/6) alpha (alpha+1) x^(alpha-1)) T^(alpha+1).
double energy_content(const ReservoirState& r);

/// Analytic partial derivatives of (N, E) in the (T, mu) variables.
struct ExtensivePartials {
    double dn_dtemperature;
    double dn_dmu;
    double de_dtemperature;
    double de_dmu;
};
ExtensivePartials extensive_partials(const ReservoirState& r);

struct ReservoirRates {
    double temperature_rate;  // dT/dt
    double x_rate;            // dx/dt, x = mu/T
};

/// Right-hand side of the slow (T_j, x_j) dynamics, flows evaluated by the
/// pairwise form. Throws SingularJacobianError when x^2 - (pi^2/6) a (a-1)
/// falls below 1e-12 x^2.
std::vector<ReservoirRates> ode_rhs(const SystemSpec& sys,
                                    std::span<const ReservoirState> reservoirs);

/// Same, with the flows already evaluated for this state.
std::vector<ReservoirRates> ode_rhs(const SystemSpec& sys,
                                    std::span<const ReservoirState> reservoirs,
                                    const FlowSet& flows);

}  // namespace fermiflux
