#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fermiflux {

/// Invariant battery over random states: flow-form identity, second law,
/// conservation, crossover exclusion zone, Table-style regime signs,
/// Sommerfeld accuracy vs quadrature, closed-form vs Newton equilibrium,
/// chain-rule flow reconstruction, zero-flow uniqueness.
struct VerifyReport {
    int checks = 0;
    int failures = 0;
    std::vector<std::string> lines;

    bool ok() const { return failures == 0; }
};

VerifyReport run_verification(std::uint64_t seed, int n_states = 10000,
                              std::ostream* progress = nullptr);

}  // namespace fermiflux
