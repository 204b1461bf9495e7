#include "fermiflux/types.hpp"

#include <cmath>
#include <sstream>

namespace fermiflux {

void SystemSpec::validate() const {
    if (modes.empty()) throw InvalidInputError("system: mode list is empty");
    for (std::size_t k = 0; k < modes.size(); ++k) {
        if (!std::isfinite(modes[k]) || modes[k] <= 0.0) {
            std::ostringstream os;
            os << "system: mode " << (k + 1) << " must be a finite positive frequency, got "
               << modes[k];
            throw InvalidInputError(os.str());
        }
    }
    if (!std::isfinite(unit_scale) || unit_scale <= 0.0)
        throw InvalidInputError("system: unit_scale must be positive");
}

bool SystemSpec::has_two_distinct_modes() const {
    for (std::size_t k = 1; k < modes.size(); ++k)
        if (modes[k] != modes[0]) return true;
    return false;
}

void ReservoirGeometry::validate() const {
    if (!std::isfinite(alpha) || alpha <= 0.0)
        throw InvalidInputError("reservoir: alpha must be positive");
    if (!std::isfinite(prefactor) || prefactor <= 0.0)
        throw InvalidInputError("reservoir: prefactor must be positive");
}

void SpectralCoupling::validate() const {
    if (!std::isfinite(amplitude) || amplitude <= 0.0)
        throw InvalidInputError("reservoir: coupling amplitude must be positive");
    if (!std::isfinite(exponent))
        throw InvalidInputError("reservoir: coupling exponent must be finite");
}

void ReservoirState::validate() const {
    geometry.validate();
    coupling.validate();
    if (!std::isfinite(temperature) || temperature <= 0.0)
        throw InvalidInputError("reservoir: temperature must be positive");
    if (!std::isfinite(chemical_potential))
        throw InvalidInputError("reservoir: chemical potential must be finite");
    if (!std::isfinite(x_min) || x_min < kHardXMin) {
        std::ostringstream os;
        os << "reservoir: x_min = " << x_min << " below the hard floor " << kHardXMin;
        throw InvalidInputError(os.str());
    }
    if (x() < x_min) {
        std::ostringstream os;
        os << "reservoir state outside the degenerate-gas domain: x = mu/T = " << x()
           << " < x_min = " << x_min << " (T = " << temperature
           << ", mu = " << chemical_potential << ")";
        throw SommerfeldDomainError(os.str());
    }
}

}  // namespace fermiflux
