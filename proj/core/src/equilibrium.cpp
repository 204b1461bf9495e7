#include "fermiflux/equilibrium.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fermiflux/thermo.hpp"

namespace fermiflux {

namespace {

constexpr double kPi2_6 = std::numbers::pi * std::numbers::pi / 6.0;
constexpr double kPi2_3 = std::numbers::pi * std::numbers::pi / 3.0;

// Raw Sommerfeld extensives in (T, mu); no domain validation so the Newton
// iteration can probe trial points (damping keeps them above the hard floor).
double n_raw(double t, double mu, double alpha, double b) {
    return b * (std::pow(mu, alpha) +
                kPi2_6 * alpha * (alpha - 1.0) * std::pow(mu, alpha - 2.0) * t * t);
}

double e_raw(double t, double mu, double alpha, double b) {
    return b * alpha / (alpha + 1.0) *
           (std::pow(mu, alpha + 1.0) +
            kPi2_6 * alpha * (alpha + 1.0) * std::pow(mu, alpha - 1.0) * t * t);
}

}  // namespace

EquilibriumPoint solve_equilibrium(std::span<const ReservoirState> initial) {
    if (initial.size() < 2)
        throw InvalidInputError("solve_equilibrium: need at least two reservoirs");

    double n_total = 0.0, e_total = 0.0, b_sum = 0.0, t_guess = 0.0, mu_guess = 0.0;
    double x_min = kHardXMin;
    for (const auto& r : initial) {
        n_total += particle_count(r);   // validates the state
        e_total += energy_content(r);
        const double b = r.geometry.prefactor;
        b_sum += b;
        t_guess += b * r.temperature;
        mu_guess += b * r.chemical_potential;
        x_min = std::max(x_min, r.x_min);
    }
    double t = t_guess / b_sum;
    double mu = mu_guess / b_sum;

    double residual = 0.0;
    int iter = 0;
    for (;; ++iter) {
        double f1 = -n_total, f2 = -e_total;
        double j11 = 0.0, j12 = 0.0, j21 = 0.0, j22 = 0.0;  // d(F1,F2)/d(T,mu)
        for (const auto& r : initial) {
            const double a = r.geometry.alpha;
            const double b = r.geometry.prefactor;
            f1 += n_raw(t, mu, a, b);
            f2 += e_raw(t, mu, a, b);
            j11 += b * kPi2_3 * a * (a - 1.0) * std::pow(mu, a - 2.0) * t;
            j12 += b * (a * std::pow(mu, a - 1.0) +
                        kPi2_6 * a * (a - 1.0) * (a - 2.0) * std::pow(mu, a - 3.0) * t * t);
            j21 += b * kPi2_3 * a * a * std::pow(mu, a - 1.0) * t;
            j22 += b * a *
                   (std::pow(mu, a) + kPi2_6 * a * (a - 1.0) * std::pow(mu, a - 2.0) * t * t);
        }
        residual = std::max(std::abs(f1) / n_total, std::abs(f2) / e_total);
        if (residual < 1e-12) break;
        if (iter >= 100) {
            std::ostringstream os;
            os << "solve_equilibrium: no convergence after 100 iterations; last iterate T = "
               << t << ", mu = " << mu << ", relative residuals (" << std::abs(f1) / n_total
               << ", " << std::abs(f2) / e_total << ")";
            throw SolverError(os.str());
        }
        const double det = j11 * j22 - j12 * j21;
        if (!(std::abs(det) > 0.0)) {
            std::ostringstream os;
            os << "solve_equilibrium: singular Jacobian at T = " << t << ", mu = " << mu;
            throw SingularJacobianError(os.str());
        }
        double dt = -(f1 * j22 - f2 * j12) / det;
        double dmu = -(j11 * f2 - j21 * f1) / det;
        // keep iterates inside T > 0, x >= hard floor
        int halvings = 0;
        while (t + dt <= 0.0 || (mu + dmu) / (t + dt) < kHardXMin) {
            dt *= 0.5;
            dmu *= 0.5;
            if (++halvings > 50) {
                std::ostringstream os;
                os << "solve_equilibrium: damping failed to find an admissible step from T = "
                   << t << ", mu = " << mu;
                throw SolverError(os.str());
            }
        }
        t += dt;
        mu += dmu;
    }

    if (mu / t < x_min) {
        std::ostringstream os;
        os << "solve_equilibrium: root x_eq = " << mu / t << " lies below x_min = " << x_min
           << " (T_eq = " << t << ", mu_eq = " << mu << ")";
        throw SommerfeldDomainError(os.str());
    }
    return {t, mu, n_total, e_total, residual, iter};
}

EquilibriumPoint equilibrium_closed_form_2d(std::span<const ReservoirState> initial) {
    if (initial.empty())
        throw InvalidInputError("equilibrium_closed_form_2d: empty reservoir list");
    for (const auto& r : initial)
        if (r.geometry.alpha != 1.0)
            throw InvalidInputError(
                "equilibrium_closed_form_2d: closed form only exists for alpha = 1 ensembles");

    double b_sum = 0.0, mu_mean = 0.0, mu2_mean = 0.0, t2_mean = 0.0;
    for (const auto& r : initial) {
        const double b = r.geometry.prefactor;
        b_sum += b;
        mu_mean += b * r.chemical_potential;
        mu2_mean += b * r.chemical_potential * r.chemical_potential;
        t2_mean += b * r.temperature * r.temperature;
    }
    mu_mean /= b_sum;
    mu2_mean /= b_sum;
    t2_mean /= b_sum;
    const double dispersion = std::max(mu2_mean - mu_mean * mu_mean, 0.0);
    const double teq = std::sqrt(t2_mean + dispersion / kPi2_3);

    double n_total = 0.0, e_total = 0.0;
    for (const auto& r : initial) {
        n_total += n_raw(r.temperature, r.chemical_potential, 1.0, r.geometry.prefactor);
        e_total += e_raw(r.temperature, r.chemical_potential, 1.0, r.geometry.prefactor);
    }
    double res_n = 0.0, res_e = 0.0;
    for (const auto& r : initial) {
        res_n += n_raw(teq, mu_mean, 1.0, r.geometry.prefactor);
        res_e += e_raw(teq, mu_mean, 1.0, r.geometry.prefactor);
    }
    const double residual = std::max(std::abs(res_n - n_total) / n_total,
                                     std::abs(res_e - e_total) / e_total);
    return {teq, mu_mean, n_total, e_total, residual, 0};
}

}  // namespace fermiflux
