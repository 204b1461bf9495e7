#include "fermiflux/flows.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fermiflux/occupancy.hpp"

namespace fermiflux {

namespace {

// Magnitudes below this are flushed to exact zero: far below any physical
// flow at scenario scales, and subnormals would only slow the stepper down.
constexpr double kFlushThreshold = 1e-250;

void flush_tiny(std::vector<double>& v) {
    for (double& x : v)
        if (std::abs(x) < kFlushThreshold) x = 0.0;
}

void check_preconditions(const SystemSpec& sys, std::span<const ReservoirState> reservoirs) {
    sys.validate();
    if (reservoirs.size() < 2)
        throw InvalidInputError("stationary flows need at least two reservoirs");
}

}  // namespace

namespace detail {

double tanh_half_difference(double vj, double vq) {
    // tanh(a) - tanh(b) = 2 sinh(a-b) / (cosh(a+b) + cosh(a-b)) with a = vj/2,
    // b = vq/2. Equals -2 (n_j - n_q); full relative accuracy even when both
    // occupancies saturate at 0 or 1.
    const double s = 0.5 * (vj - vq);
    const double m = 0.5 * (vj + vq);
    const double mag = std::max(std::abs(s), std::abs(m));
    if (mag < 350.0) return 2.0 * std::sinh(s) / (std::cosh(m) + std::cosh(s));
    // rescale every exponential by exp(-mag); at least one denominator term is 1
    double num;
    if (std::abs(s) < 350.0)
        num = 2.0 * std::sinh(s) * std::exp(-mag);
    else
        num = std::exp(s - mag) - std::exp(-s - mag);
    const double den =
        std::exp(m - mag) + std::exp(-m - mag) + std::exp(s - mag) + std::exp(-s - mag);
    return 2.0 * num / den;
}

}  // namespace detail

PairwiseKernel PairwiseKernel::build(const SystemSpec& sys,
                                     std::span<const ReservoirState> reservoirs) {
    check_preconditions(sys, reservoirs);
    PairwiseKernel k;
    k.n_modes = sys.modes.size();
    k.n_reservoirs = reservoirs.size();
    k.pair_weight.assign(k.n_modes * k.n_reservoirs * k.n_reservoirs, 0.0);
    k.reduced_energy.assign(k.n_modes * k.n_reservoirs, 0.0);
    std::vector<double> gamma(k.n_reservoirs);
    for (std::size_t m = 0; m < k.n_modes; ++m) {
        const double w = sys.modes[m];
        double total = 0.0;
        for (std::size_t j = 0; j < k.n_reservoirs; ++j) {
            gamma[j] = reservoirs[j].gamma(w);
            total += gamma[j];
        }
        for (std::size_t j = 0; j < k.n_reservoirs; ++j) {
            k.reduced_energy[m * k.n_reservoirs + j] = reservoirs[j].reduced_energy(w);
            for (std::size_t q = 0; q < k.n_reservoirs; ++q)
                k.pair_weight[(m * k.n_reservoirs + j) * k.n_reservoirs + q] =
                    gamma[j] * gamma[q] / total;
        }
    }
    return k;
}

FlowSet stationary_flows_direct(const SystemSpec& sys,
                                std::span<const ReservoirState> reservoirs) {
    check_preconditions(sys, reservoirs);
    const std::size_t n = reservoirs.size();
    FlowSet f;
    f.energy.assign(n, 0.0);
    f.particle.assign(n, 0.0);
    f.heat.assign(n, 0.0);
    for (const double w : sys.modes) {
        const double nt = weighted_occupancy(w, reservoirs);
        for (std::size_t j = 0; j < n; ++j) {
            const auto& r = reservoirs[j];
            const double d =
                r.gamma(w) * (fermi_occupancy(w, r.chemical_potential, r.temperature) - nt);
            f.energy[j] += w * d;
            f.particle[j] += d;
            f.heat[j] += (w - r.chemical_potential) * d;
        }
    }
    flush_tiny(f.energy);
    flush_tiny(f.particle);
    flush_tiny(f.heat);
    f.sigma = entropy_production(f, reservoirs);
    return f;
}

FlowSet stationary_flows_pairwise(const SystemSpec& sys,
                                  std::span<const ReservoirState> reservoirs) {
    check_preconditions(sys, reservoirs);
    const std::size_t n = reservoirs.size();
    FlowSet f;
    f.energy.assign(n, 0.0);
    f.particle.assign(n, 0.0);
    f.heat.assign(n, 0.0);
    std::vector<double> gamma(n), v(n);
    for (const double w : sys.modes) {
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            gamma[j] = reservoirs[j].gamma(w);
            v[j] = reservoirs[j].reduced_energy(w);
            total += gamma[j];
        }
        // Each unordered pair contributes +term to j and -term to q, so the
        // particle and energy sums cancel exactly, not just to rounding.
        for (std::size_t j = 0; j + 1 < n; ++j) {
            for (std::size_t q = j + 1; q < n; ++q) {
                const double weight = gamma[j] * gamma[q] / total;
                // gamma_j (n_j - n~) summed over partners: term = Gamma_jq (n_j - n_q)
                const double term = -0.5 * weight * detail::tanh_half_difference(v[j], v[q]);
                f.particle[j] += term;
                f.particle[q] -= term;
                f.energy[j] += w * term;
                f.energy[q] -= w * term;
                f.heat[j] += reservoirs[j].temperature * v[j] * term;
                f.heat[q] -= reservoirs[q].temperature * v[q] * term;
            }
        }
    }
    flush_tiny(f.energy);
    flush_tiny(f.particle);
    flush_tiny(f.heat);
    f.sigma = entropy_production(f, reservoirs);
    return f;
}

double entropy_production(const FlowSet& flows, std::span<const ReservoirState> reservoirs) {
    if (flows.size() != reservoirs.size())
        throw InvalidInputError("entropy_production: flow set and reservoir list sizes differ");
    std::vector<double> terms(flows.size());
    for (std::size_t j = 0; j < flows.size(); ++j)
        terms[j] = flows.heat[j] / reservoirs[j].temperature;
    // ascending-magnitude summation keeps the near-equilibrium cancellation tight
    std::sort(terms.begin(), terms.end(),
              [](double a, double b) { return std::abs(a) < std::abs(b); });
    double sum = 0.0;
    for (double t : terms) sum += t;
    return -sum;
}

double slot_slack(const FlowSet& flows, std::span<const ReservoirState> reservoirs) {
    if (flows.size() != reservoirs.size())
        throw InvalidInputError("slot_slack: flow set and reservoir list sizes differ");
    double scale = 0.0;
    for (std::size_t j = 0; j < flows.size(); ++j)
        scale = std::max(scale, std::abs(flows.heat[j] / reservoirs[j].temperature));
    return 1e-12 * scale;
}

FlowScales flow_term_scales(const SystemSpec& sys, std::span<const ReservoirState> reservoirs) {
    const std::size_t n = reservoirs.size();
    FlowScales s;
    s.energy.assign(n, 0.0);
    s.particle.assign(n, 0.0);
    s.heat.assign(n, 0.0);
    for (const double w : sys.modes) {
        for (std::size_t j = 0; j < n; ++j) {
            const double g = reservoirs[j].gamma(w);
            s.particle[j] += g;
            s.energy[j] += g * w;
            s.heat[j] += g * std::abs(w - reservoirs[j].chemical_potential);
        }
    }
    return s;
}

}  // namespace fermiflux
