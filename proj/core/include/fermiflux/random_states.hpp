#pragma once

#include <random>
#include <vector>

#include "fermiflux/types.hpp"

namespace fermiflux {

/// Random reachable states for property checks. Modes are placed around the
/// Fermi edges (never deeper than ~7 T_min below the highest mu) so the
/// direct flow form keeps enough relative accuracy to compare against.
struct RandomStateOptions {
    int min_reservoirs = 2;
    int max_reservoirs = 6;
    int min_modes = 1;
    int max_modes = 8;
    double x_low = 5.0;
    double x_high = 40.0;
    bool alpha_one_only = false;
};

struct RandomEnsemble {
    SystemSpec system;
    std::vector<ReservoirState> reservoirs;
};

RandomEnsemble random_ensemble(std::mt19937_64& rng, const RandomStateOptions& opts = {});

/// All-alpha=1 ensembles whose equilibrium stays inside the Sommerfeld domain,
/// for closed-form vs Newton cross-checks.
std::vector<ReservoirState> random_alpha1_ensemble(std::mt19937_64& rng);

/// Seed from FERMIFLUX_SEED when set, else the fixed default 20260810.
std::uint64_t seed_from_environment();

}  // namespace fermiflux
