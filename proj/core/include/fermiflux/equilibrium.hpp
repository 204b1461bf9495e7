#pragma once

#include <span>

#include "fermiflux/types.hpp"

namespace fermiflux {

struct EquilibriumPoint {
    double temperature = 0.0;          // T_eq
    double chemical_potential = 0.0;   // mu_eq
    double n_total = 0.0;              // conserved totals the point satisfies
    double e_total = 0.0;
    double residual = 0.0;             // max relative residual of the two equations
    int iterations = 0;
};

/// Damped 2-variable Newton solve of
///   sum_j N_j(T_eq, mu_eq) = sum_j N_j(0),  sum_j E_j(T_eq, mu_eq) = sum_j E_j(0)
/// with analytic partials. Initial guess: B-weighted means of (T_j, mu_j).
/// Throws SolverError on non-convergence, SommerfeldDomainError if the root
/// lands below x_min.
EquilibriumPoint solve_equilibrium(std::span<const ReservoirState> initial);

/// Closed form for all-alpha=1 ensembles: mu_eq = <mu>,
/// T_eq^2 = <T^2> + (<mu^2> - <mu>^2)/(pi^2/3), with B-weighted means.
EquilibriumPoint equilibrium_closed_form_2d(std::span<const ReservoirState> initial);

}  // namespace fermiflux
