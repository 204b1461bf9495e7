#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fermiflux/types.hpp"

namespace fermiflux {

/// Symmetric pair weights Gamma_jqk = gamma_j(w_k) gamma_q(w_k) / sum_q gamma_q(w_k)
/// and reduced energies v_kj = (w_k - mu_j)/T_j.
struct PairwiseKernel {
    std::size_t n_modes = 0;
    std::size_t n_reservoirs = 0;
    std::vector<double> pair_weight;     // [k][j][q], symmetric in (j,q), >= 0
    std::vector<double> reduced_energy;  // [k][j]

    double weight(std::size_t k, std::size_t j, std::size_t q) const {
        return pair_weight[(k * n_reservoirs + j) * n_reservoirs + q];
    }
    double v(std::size_t k, std::size_t j) const {
        return reduced_energy[k * n_reservoirs + j];
    }

    static PairwiseKernel build(const SystemSpec& sys, std::span<const ReservoirState> reservoirs);
};

/// Flows by direct summation over modes, J_j = sum_k w_k gamma_j (n_j - n~).
/// Reference form; cancels catastrophically in deep Fermi tails.
FlowSet stationary_flows_direct(const SystemSpec& sys, std::span<const ReservoirState> reservoirs);

/// Algebraically identical flows via the pairwise hyperbolic form. Stable for
/// arbitrarily deep tails; this is the form the integrator consumes.
FlowSet stationary_flows_pairwise(const SystemSpec& sys, std::span<const ReservoirState> reservoirs);

/// sigma = -sum_j Y_j / T_j, summed in ascending magnitude order.
double entropy_production(const FlowSet& flows, std::span<const ReservoirState> reservoirs);

/// Allowed negative slack on sigma: 1e-12 * max_j |Y_j / T_j|.
double slot_slack(const FlowSet& flows, std::span<const ReservoirState> reservoirs);

/// Natural magnitudes of the flow sums' terms, one per reservoir; used to
/// decide when a near-cancelled component is "zero at working precision".
struct FlowScales {
    std::vector<double> energy;
    std::vector<double> particle;
    std::vector<double> heat;
};
FlowScales flow_term_scales(const SystemSpec& sys, std::span<const ReservoirState> reservoirs);

namespace detail {

/// tanh(vj/2) - tanh(vq/2) without overflow or spurious underflow; equals
/// -2 (n_j - n_q) and stays fully accurate when both occupancies saturate.
double tanh_half_difference(double vj, double vq);

}  // namespace detail

}  // namespace fermiflux
