#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fermiflux/errors.hpp"

namespace fermiflux {

// Units: hbar = k_B = 1; energies, temperatures and chemical potentials are
// stored in units of the reference temperature T~. Time is in 1/T~ units.

/// Hard floor of the degenerate-gas expansion; states below it are rejected
/// outright, while x_min (default 5) is the configurable soft boundary.
inline constexpr double kHardXMin = 3.0;

/// OQS mode frequencies plus the reference temperature used for labeling.
struct SystemSpec {
    std::vector<double> modes;     // omega_kappa > 0
    double unit_scale = 1000.0;    // T~ in kelvin; labeling only

    void validate() const;

    /// Uniqueness of the equilibrium needs at least two distinct frequencies.
    bool has_two_distinct_modes() const;
};

/// alpha = D/d and the density-of-states scale B = A V / alpha. All geometric
/// constants (S_D, c, dimensions, volume, hbar) are absorbed into B.
struct ReservoirGeometry {
    double alpha = 1.5;
    double prefactor = 1.0;   // B, per energy^alpha

    void validate() const;
};

/// Power-law coupling gamma(omega) = amplitude * omega^exponent (omega in T~ units).
struct SpectralCoupling {
    double amplitude = 1e-4;
    double exponent = 0.5;

    double operator()(double omega) const { return amplitude * std::pow(omega, exponent); }

    void validate() const;
};

/// Instantaneous (T, mu) of one reservoir plus its fixed geometry and coupling.
struct ReservoirState {
    double temperature = 1.0;
    double chemical_potential = 20.0;
    ReservoirGeometry geometry;
    SpectralCoupling coupling;
    double x_min = 5.0;   // configurable Sommerfeld validity bound, >= kHardXMin

    double x() const { return chemical_potential / temperature; }
    double reduced_energy(double omega) const {
        return (omega - chemical_potential) / temperature;
    }
    double gamma(double omega) const { return coupling(omega); }

    /// Throws SommerfeldDomainError if x < x_min, InvalidInputError on bad fields.
    void validate() const;
};

/// Quasi-stationary flows out of each reservoir and the entropy production
/// sigma = -sum_j Y_j / T_j.
struct FlowSet {
    std::vector<double> energy;     // J_j
    std::vector<double> particle;   // P_j
    std::vector<double> heat;       // Y_j = J_j - mu_j P_j
    double sigma = 0.0;

    std::size_t size() const { return energy.size(); }
};

}  // namespace fermiflux
