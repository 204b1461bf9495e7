#include "fermiflux/random_states.hpp"

#include <cmath>
#include <cstdlib>

namespace fermiflux {

RandomEnsemble random_ensemble(std::mt19937_64& rng, const RandomStateOptions& opts) {
    std::uniform_int_distribution<int> n_res_dist(opts.min_reservoirs, opts.max_reservoirs);
    std::uniform_int_distribution<int> n_mode_dist(opts.min_modes, opts.max_modes);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (;;) {
        const int n = n_res_dist(rng);
        const int n_modes = n_mode_dist(rng);
        RandomEnsemble ens;
        ens.system.unit_scale = 1000.0;

        const double t_base = 0.3 + 0.7 * unit(rng);
        const double mu_base = 10.0 + 20.0 * unit(rng);
        double t_min = t_base;
        std::vector<double> alphas{1.0, 1.5, 3.0};

        bool ok = true;
        for (int j = 0; j < n; ++j) {
            ReservoirState r;
            r.temperature = t_base * (0.8 + 0.45 * unit(rng));
            t_min = std::min(t_min, r.temperature);
            r.chemical_potential = mu_base + (2.0 * unit(rng) - 1.0) * 2.0 * t_base;
            r.geometry.alpha =
                opts.alpha_one_only ? 1.0 : alphas[std::size_t(3.0 * unit(rng)) % 3];
            r.geometry.prefactor = std::pow(10.0, 2.0 * unit(rng));
            r.coupling.amplitude = std::pow(10.0, -5.0 + 2.0 * unit(rng));
            r.coupling.exponent = r.geometry.alpha - 1.0;
            const double x = r.x();
            if (x < opts.x_low + 1e-4 || x > opts.x_high) {
                ok = false;
                break;
            }
            ens.reservoirs.push_back(r);
        }
        if (!ok) continue;

        double mu_max = ens.reservoirs[0].chemical_potential;
        double t_max = ens.reservoirs[0].temperature;
        for (const auto& r : ens.reservoirs) {
            mu_max = std::max(mu_max, r.chemical_potential);
            t_max = std::max(t_max, r.temperature);
        }
        // keep the deepest negative reduced energy around -7 T_min/T so the
        // direct form stays meaningfully comparable
        const double w_lo = std::max(0.1, mu_max - 7.0 * t_min);
        const double w_hi = mu_max + 12.0 * t_max;
        for (int k = 0; k < n_modes; ++k)
            ens.system.modes.push_back(w_lo + (w_hi - w_lo) * unit(rng));
        return ens;
    }
}

std::vector<ReservoirState> random_alpha1_ensemble(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> n_dist(2, 5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int n = n_dist(rng);
    const double t_base = 0.05 + 0.45 * unit(rng);
    std::vector<ReservoirState> out;
    for (int j = 0; j < n; ++j) {
        ReservoirState r;
        r.temperature = t_base * (0.8 + 0.4 * unit(rng));
        r.chemical_potential = 16.0 + 8.0 * unit(rng);
        r.geometry.alpha = 1.0;
        r.geometry.prefactor = std::pow(10.0, 2.0 * unit(rng));
        r.coupling.amplitude = 1e-4;
        r.coupling.exponent = 0.0;
        out.push_back(r);
    }
    return out;
}

std::uint64_t seed_from_environment() {
    if (const char* env = std::getenv("FERMIFLUX_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0') return v;
    }
    return 20260810ull;
}

}  // namespace fermiflux
