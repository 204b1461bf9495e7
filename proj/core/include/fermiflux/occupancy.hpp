#pragma once

#include <optional>
#include <span>

#include "fermiflux/types.hpp"

namespace fermiflux {

/// Fermi-Dirac occupancy 1/(exp((omega-mu)/T)+1), branch-stable for |omega-mu|/T
/// up to ~700.
double fermi_occupancy(double omega, double mu, double temperature);

/// Coupling-weighted occupancy n~(omega) = sum_j gamma_j n_j / sum_j gamma_j;
/// the quasi-stationary occupation of an OQS mode at this frequency.
double weighted_occupancy(double omega, std::span<const ReservoirState> reservoirs);

/// Frequency at which the two occupancies coincide,
/// omega~ = (T1 mu2 - T2 mu1)/(T1 - T2). Empty when T1 = T2 (relative 1e-14):
/// the occupancies are parallel and no finite crossover exists.
std::optional<double> crossover_frequency(const ReservoirState& r1, const ReservoirState& r2);

/// (mu2 - (T2/T1) mu1)(1 - T2/T1) > 0, the condition for a positive crossover
/// (stated for mu1 > mu2).
bool positive_crossover_exists(const ReservoirState& r1, const ReservoirState& r2);

enum class FlowSign : int { negative = -1, zero = 0, positive = 1 };

struct SignTriple {
    FlowSign energy;    // sign of j(omega)
    FlowSign particle;  // sign of p(omega)
    FlowSign heat;      // sign of y(omega)

    bool operator==(const SignTriple&) const = default;
};

struct RegimePattern {
    SignTriple first;
    SignTriple second;

    bool operator==(const RegimePattern&) const = default;
};

/// Two-reservoir transport-regime classifier: signs of
/// p1 = Gamma_omega (n1 - n2), j_{1,2} = omega p_{1,2}, y_{1,2} = (omega - mu_{1,2}) p_{1,2}
/// with p2 = -p1 and Gamma_omega = gamma1 gamma2 / (gamma1 + gamma2).
/// Magnitudes below 1e-15 of the corresponding flow scale map to zero.
RegimePattern classify_regime(double omega, const ReservoirState& r1, const ReservoirState& r2);

}  // namespace fermiflux
