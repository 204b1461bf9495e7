#include "fermiflux/occupancy.hpp"

#include <cmath>
#include <sstream>

namespace fermiflux {

double fermi_occupancy(double omega, double mu, double temperature) {
    if (!std::isfinite(omega) || !std::isfinite(mu) || !std::isfinite(temperature))
        throw InvalidInputError("fermi_occupancy: non-finite input");
    if (temperature <= 0.0)
        throw InvalidInputError("fermi_occupancy: temperature must be positive");
    const double v = (omega - mu) / temperature;
    // exp(-|v|)/(1+exp(-|v|)) never overflows
    if (v >= 0.0) {
        const double e = std::exp(-v);
        return e / (1.0 + e);
    }
    const double e = std::exp(v);
    return 1.0 / (1.0 + e);
}

double weighted_occupancy(double omega, std::span<const ReservoirState> reservoirs) {
    if (reservoirs.empty())
        throw InvalidInputError("weighted_occupancy: empty reservoir list");
    if (!std::isfinite(omega) || omega <= 0.0)
        throw InvalidInputError("weighted_occupancy: frequency must be positive");
    double num = 0.0, den = 0.0;
    for (const auto& r : reservoirs) {
        const double g = r.gamma(omega);
        num += g * fermi_occupancy(omega, r.chemical_potential, r.temperature);
        den += g;
    }
    return num / den;
}

std::optional<double> crossover_frequency(const ReservoirState& r1, const ReservoirState& r2) {
    const double t1 = r1.temperature, t2 = r2.temperature;
    const double m1 = r1.chemical_potential, m2 = r2.chemical_potential;
    if (!std::isfinite(t1) || !std::isfinite(t2) || !std::isfinite(m1) || !std::isfinite(m2))
        throw InvalidInputError("crossover_frequency: non-finite input");
    // Equal temperatures make the occupancies parallel: no finite crossover.
    if (std::abs(t1 - t2) <= 1e-14 * std::max(std::abs(t1), std::abs(t2)))
        return std::nullopt;
    return (t1 * m2 - t2 * m1) / (t1 - t2);
}

bool positive_crossover_exists(const ReservoirState& r1, const ReservoirState& r2) {
    const double ratio = r2.temperature / r1.temperature;
    return (r2.chemical_potential - ratio * r1.chemical_potential) * (1.0 - ratio) > 0.0;
}

namespace {

FlowSign sign_with_deadband(double value, double scale) {
    if (std::abs(value) <= 1e-15 * scale) return FlowSign::zero;
    return value > 0.0 ? FlowSign::positive : FlowSign::negative;
}

}  // namespace

RegimePattern classify_regime(double omega, const ReservoirState& r1, const ReservoirState& r2) {
    if (!std::isfinite(omega) || omega <= 0.0)
        throw InvalidInputError("classify_regime: frequency must be positive");
    const double g1 = r1.gamma(omega), g2 = r2.gamma(omega);
    const double gamma_pair = g1 * g2 / (g1 + g2);
    const double n1 = fermi_occupancy(omega, r1.chemical_potential, r1.temperature);
    const double n2 = fermi_occupancy(omega, r2.chemical_potential, r2.temperature);

    const double p1 = gamma_pair * (n1 - n2);
    const double p2 = -p1;
    const double j1 = omega * p1;
    const double j2 = omega * p2;
    const double y1 = (omega - r1.chemical_potential) * p1;
    const double y2 = (omega - r2.chemical_potential) * p2;

    const double p_scale = gamma_pair;
    const double j_scale = gamma_pair * omega;
    const double y1_scale = gamma_pair * (omega + std::abs(r1.chemical_potential));
    const double y2_scale = gamma_pair * (omega + std::abs(r2.chemical_potential));

    RegimePattern out;
    out.first = {sign_with_deadband(j1, j_scale), sign_with_deadband(p1, p_scale),
                 sign_with_deadband(y1, y1_scale)};
    out.second = {sign_with_deadband(j2, j_scale), sign_with_deadband(p2, p_scale),
                  sign_with_deadband(y2, y2_scale)};
    return out;
}

}  // namespace fermiflux
