#include "fermiflux/thermo.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fermiflux/flows.hpp"

namespace fermiflux {

namespace {
constexpr double kPi2_6 = std::numbers::pi * std::numbers::pi / 6.0;
constexpr double kPi2_3 = std::numbers::pi * std::numbers::pi / 3.0;
}  // namespace

double sommerfeld_q(double alpha, double x) {
    return std::pow(x, alpha) + kPi2_6 * alpha * (alpha - 1.0) * std::pow(x, alpha - 2.0);
}

double particle_count(const ReservoirState& r) {
    r.validate();
    const double a = r.geometry.alpha;
    return r.geometry.prefactor * sommerfeld_q(a, r.x()) * std::pow(r.temperature, a);
}

double energy_content(const ReservoirState& r) {
    r.validate();
    const double a = r.geometry.alpha;
    return r.geometry.prefactor * a / (a + 1.0) * sommerfeld_q(a + 1.0, r.x()) *
           std::pow(r.temperature, a + 1.0);
}

ExtensivePartials extensive_partials(const ReservoirState& r) {
    r.validate();
    const double a = r.geometry.alpha;
    const double b = r.geometry.prefactor;
    const double t = r.temperature;
    const double mu = r.chemical_potential;
    ExtensivePartials p;
    p.dn_dtemperature = b * kPi2_3 * a * (a - 1.0) * std::pow(mu, a - 2.0) * t;
    p.dn_dmu = b * (a * std::pow(mu, a - 1.0) +
                    kPi2_6 * a * (a - 1.0) * (a - 2.0) * std::pow(mu, a - 3.0) * t * t);
    p.de_dtemperature = b * kPi2_3 * a * a * std::pow(mu, a - 1.0) * t;
    p.de_dmu =
        b * a * (std::pow(mu, a) + kPi2_6 * a * (a - 1.0) * std::pow(mu, a - 2.0) * t * t);
    return p;
}

std::vector<ReservoirRates> ode_rhs(const SystemSpec& sys,
                                    std::span<const ReservoirState> reservoirs,
                                    const FlowSet& flows) {
    if (flows.size() != reservoirs.size())
        throw InvalidInputError("ode_rhs: flow set and reservoir list sizes differ");
    std::vector<ReservoirRates> rates(reservoirs.size());
    for (std::size_t j = 0; j < reservoirs.size(); ++j) {
        const auto& r = reservoirs[j];
        r.validate();
        const double a = r.geometry.alpha;
        const double t = r.temperature;
        const double x = r.x();
        const double den_factor = x * x - kPi2_6 * a * (a - 1.0);
        if (std::abs(den_factor) < 1e-12 * x * x) {
            std::ostringstream os;
            os << "ode_rhs: singular extensive-variable Jacobian for reservoir " << (j + 1)
               << ": x^2 - (pi^2/6) a (a-1) = " << den_factor << " at x = " << x
               << ", alpha = " << a;
            throw SingularJacobianError(os.str());
        }
        // A~ V = B alpha pi^2 / 3; only the product is observable
        const double atv = r.geometry.prefactor * a * kPi2_3;
        const double den = atv * std::pow(t, a) * std::pow(x, 2.0 * a - 4.0) * den_factor;
        const double q_a = sommerfeld_q(a, x);
        const double q_lo = sommerfeld_q(a - 1.0, x);
        const double q_hi = sommerfeld_q(a + 1.0, x);
        const double p = flows.particle[j];
        const double e = flows.energy[j];
        rates[j].temperature_rate = -(-q_a * t * p + q_lo * e) / den;
        rates[j].x_rate = (-q_hi * t * p + q_a * e) / (den * t);
    }
    return rates;
}

std::vector<ReservoirRates> ode_rhs(const SystemSpec& sys,
                                    std::span<const ReservoirState> reservoirs) {
    return ode_rhs(sys, reservoirs, stationary_flows_pairwise(sys, reservoirs));
}

}  // namespace fermiflux
