#include "fermiflux/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "fermiflux/equilibrium.hpp"
#include "fermiflux/fermi_integral.hpp"
#include "fermiflux/flows.hpp"
#include "fermiflux/occupancy.hpp"
#include "fermiflux/random_states.hpp"
#include "fermiflux/thermo.hpp"

namespace fermiflux {

namespace {

constexpr double kEps = 2.220446049250313e-16;
constexpr double kPi2_3 = std::numbers::pi * std::numbers::pi / 3.0;

struct Check {
    VerifyReport& report;
    std::ostream* progress;

    void operator()(bool ok, const std::string& name, const std::string& detail) {
        ++report.checks;
        if (!ok) ++report.failures;
        std::ostringstream os;
        os << (ok ? "[ok]   " : "[FAIL] ") << name << ": " << detail;
        report.lines.push_back(os.str());
        if (progress) *progress << report.lines.back() << "\n";
    }
};

bool component_close(double a, double b, double scale) {
    const double mag = std::max(std::abs(a), std::abs(b));
    if (mag < 1e-250) return true;
    if (std::abs(a - b) <= 1e-10 * mag) return true;
    // cancellation-limited components: compare against the term scale instead
    return std::abs(a - b) <= 1e-10 * scale;
}

// exact sign expectations of Table-style regime blocks
struct TriExpect {
    int j, p, y;
};
bool matches(const SignTriple& got, const TriExpect& want) {
    return static_cast<int>(got.energy) == want.j && static_cast<int>(got.particle) == want.p &&
           static_cast<int>(got.heat) == want.y;
}

}  // namespace

VerifyReport run_verification(std::uint64_t seed, int n_states, std::ostream* progress) {
    VerifyReport report;
    Check check{report, progress};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // ---- flow-form identity, second law, conservation, heat definition ----
    {
        int identity_bad = 0, slot_bad = 0, conserve_bad = 0, heatdef_bad = 0;
        double worst_rel = 0.0, min_sigma = 0.0;
        for (int it = 0; it < n_states; ++it) {
            const RandomEnsemble ens = random_ensemble(rng);
            const auto direct = stationary_flows_direct(ens.system, ens.reservoirs);
            const auto pairwise = stationary_flows_pairwise(ens.system, ens.reservoirs);
            const auto scales = flow_term_scales(ens.system, ens.reservoirs);
            for (std::size_t j = 0; j < ens.reservoirs.size(); ++j) {
                if (!component_close(direct.energy[j], pairwise.energy[j], scales.energy[j]) ||
                    !component_close(direct.particle[j], pairwise.particle[j],
                                     scales.particle[j]) ||
                    !component_close(direct.heat[j], pairwise.heat[j], scales.heat[j]))
                    ++identity_bad;
                const double y_from_def = pairwise.energy[j] - ens.reservoirs[j].chemical_potential *
                                                                   pairwise.particle[j];
                if (std::abs(y_from_def - pairwise.heat[j]) >
                    8.0 * kEps * (scales.heat[j] + scales.energy[j]))
                    ++heatdef_bad;
                const double mag = std::max(std::abs(direct.energy[j]),
                                            std::abs(pairwise.energy[j]));
                if (mag > 1e-250)
                    worst_rel = std::max(worst_rel, std::abs(direct.energy[j] -
                                                             pairwise.energy[j]) / mag);
            }
            min_sigma = std::min(min_sigma, pairwise.sigma);
            if (pairwise.sigma < -slot_slack(pairwise, ens.reservoirs)) ++slot_bad;
            double sum_p = 0.0, sum_j = 0.0, p_scale = 0.0, j_scale = 0.0;
            for (std::size_t j = 0; j < ens.reservoirs.size(); ++j) {
                sum_p += pairwise.particle[j];
                sum_j += pairwise.energy[j];
                p_scale = std::max(p_scale, scales.particle[j]);
                j_scale = std::max(j_scale, scales.energy[j]);
            }
            if (std::abs(sum_p) > 8.0 * kEps * p_scale || std::abs(sum_j) > 8.0 * kEps * j_scale)
                ++conserve_bad;
        }
        std::ostringstream d;
        d << n_states << " states, mismatches " << identity_bad;
        check(identity_bad == 0, "flow-form identity (direct vs pairwise)", d.str());
        std::ostringstream d2;
        d2 << "min sigma " << min_sigma << ", violations " << slot_bad;
        check(slot_bad == 0, "second law sigma >= -slack", d2.str());
        std::ostringstream d3;
        d3 << "violations " << conserve_bad;
        check(conserve_bad == 0, "flow conservation sums", d3.str());
        check(heatdef_bad == 0, "heat = energy - mu * particle", "violations " +
                                                                     std::to_string(heatdef_bad));
    }

    // ---- two reservoirs, equal chemical potentials: hot loses heat ----
    {
        int bad = 0;
        for (int it = 0; it < 1000; ++it) {
            RandomStateOptions opts;
            opts.min_reservoirs = opts.max_reservoirs = 2;
            RandomEnsemble ens = random_ensemble(rng, opts);
            ens.reservoirs[1].chemical_potential = ens.reservoirs[0].chemical_potential;
            if (ens.reservoirs[1].x() < 5.0 || ens.reservoirs[1].x() > 45.0) continue;
            const auto flows = stationary_flows_pairwise(ens.system, ens.reservoirs);
            const std::size_t hot =
                ens.reservoirs[0].temperature >= ens.reservoirs[1].temperature ? 0 : 1;
            const auto scales = flow_term_scales(ens.system, ens.reservoirs);
            if (flows.heat[hot] < -1e-13 * scales.heat[hot]) ++bad;
        }
        check(bad == 0, "equal-mu pair: hot reservoir loses heat",
              "violations " + std::to_string(bad));
    }

    // ---- crossover frequency never strictly inside (mu2, mu1) ----
    {
        int bad = 0, existing = 0;
        for (int it = 0; it < 1000; ++it) {
            RandomStateOptions opts;
            opts.min_reservoirs = opts.max_reservoirs = 2;
            const RandomEnsemble ens = random_ensemble(rng, opts);
            const auto& a = ens.reservoirs[0];
            const auto& b = ens.reservoirs[1];
            const auto& r1 = a.chemical_potential >= b.chemical_potential ? a : b;
            const auto& r2 = a.chemical_potential >= b.chemical_potential ? b : a;
            const auto wt = crossover_frequency(r1, r2);
            if (!wt) continue;
            ++existing;
            const double m1 = r1.chemical_potential, m2 = r2.chemical_potential;
            if (*wt > m2 + 1e-12 * std::abs(m2) && *wt < m1 - 1e-12 * std::abs(m1)) ++bad;
        }
        check(bad == 0, "crossover excluded from (mu2, mu1)",
              std::to_string(existing) + " finite crossovers, violations " + std::to_string(bad));
    }

    // ---- transport-regime sign table, both temperature orderings ----
    {
        int cell_bad = 0, flip_bad = 0;
        const TriExpect b1r1[4] = {{1, 1, -1}, {1, 1, -1}, {1, 1, 1}, {-1, -1, -1}};
        const TriExpect b1r2[4] = {{-1, -1, 1}, {-1, -1, -1}, {-1, -1, -1}, {1, 1, 1}};
        const TriExpect b2r1[4] = {{-1, -1, 1}, {1, 1, -1}, {1, 1, -1}, {1, 1, 1}};
        const TriExpect b2r2[4] = {{1, 1, -1}, {-1, -1, 1}, {-1, -1, -1}, {-1, -1, -1}};
        for (int rep = 0; rep < 50; ++rep) {
            for (int block = 0; block < 2; ++block) {
                ReservoirState r1, r2;
                r1.coupling = {1e-4, 0.5};
                r2.coupling = {2e-4, 0.5};
                double wt = 0.0, m1 = 0.0, m2 = 0.0;
                for (;;) {
                    if (block == 0) {
                        r1.temperature = 0.5 + 0.4 * unit(rng);
                        r2.temperature = 1.0 + 0.4 * unit(rng);
                        m2 = 14.0 + 4.0 * unit(rng);
                        m1 = m2 + 1.0 + 3.0 * unit(rng);
                    } else {
                        r1.temperature = 1.1 + 0.4 * unit(rng);
                        r2.temperature = 0.5 + 0.3 * unit(rng);
                        m2 = 14.0 + 4.0 * unit(rng);
                        m1 = m2 + 0.5 + 1.5 * unit(rng);
                    }
                    r1.chemical_potential = m1;
                    r2.chemical_potential = m2;
                    const auto w = crossover_frequency(r1, r2);
                    if (!w) continue;
                    wt = *w;
                    if (block == 0 && wt > m1) break;                 // omega~ > mu1
                    if (block == 1 && wt > 0.05 * m2 && wt < m2) break;  // 0 < omega~ < mu2
                }
                double edges[5];
                if (block == 0) {
                    edges[0] = 0.02 * m2;
                    edges[1] = m2;
                    edges[2] = m1;
                    edges[3] = wt;
                    edges[4] = wt * 1.4 + 2.0;
                } else {
                    edges[0] = 0.2 * wt;
                    edges[1] = wt;
                    edges[2] = m2;
                    edges[3] = m1;
                    edges[4] = m1 * 1.4 + 2.0;
                }
                for (int col = 0; col < 4; ++col) {
                    const double lo = edges[col], hi = edges[col + 1];
                    for (int s = 0; s < 10; ++s) {
                        const double w = lo + (hi - lo) * (s + 0.5) / 10.0;
                        const auto got = classify_regime(w, r1, r2);
                        const auto want1 = (block == 0 ? b1r1 : b2r1)[col];
                        const auto want2 = (block == 0 ? b1r2 : b2r2)[col];
                        if (!matches(got.first, want1) || !matches(got.second, want2))
                            ++cell_bad;
                        // p-sign must agree with sign(n1 - n2) flipping exactly at omega~
                        const double n1 = fermi_occupancy(w, m1, r1.temperature);
                        const double n2 = fermi_occupancy(w, m2, r2.temperature);
                        const int side = w < wt ? 1 : -1;
                        const int occ = n1 > n2 ? 1 : -1;
                        const int blk = block == 0 ? 1 : -1;
                        if (occ != blk * side || static_cast<int>(got.first.particle) != occ)
                            ++flip_bad;
                    }
                }
            }
        }
        check(cell_bad == 0, "regime sign table (both blocks, 10 per interval)",
              "mismatches " + std::to_string(cell_bad));
        check(flip_bad == 0, "p-sign flips exactly at the crossover",
              "mismatches " + std::to_string(flip_bad));
    }

    // ---- Sommerfeld accuracy against the quadrature oracle ----
    {
        // attainable truncation bounds; the next-order term scales as
        // (alpha+1) alpha (alpha-1) (alpha-2) (7 pi^4/360) / x^4
        struct Pin {
            double alpha, bound10, bound30;
        };
        const Pin pins[] = {{1.0, 1e-3, 1e-5}, {1.5, 1e-3, 1e-5}, {3.0, 6e-3, 1e-4}};
        bool all_ok = true;
        std::ostringstream detail;
        for (const auto& pin : pins) {
            ReservoirState r;
            r.geometry.alpha = pin.alpha;
            r.geometry.prefactor = 1.0;
            double dev[2];
            for (int i = 0; i < 2; ++i) {
                const double x = i == 0 ? 10.0 : 30.0;
                r.temperature = 1.0;
                r.chemical_potential = x;
                const double n_ref =
                    pin.alpha * fermi_integral(pin.alpha - 1.0, r.chemical_potential, 1.0);
                const double e_ref =
                    pin.alpha * fermi_integral(pin.alpha, r.chemical_potential, 1.0);
                dev[i] = std::max(std::abs(particle_count(r) / n_ref - 1.0),
                                  std::abs(energy_content(r) / e_ref - 1.0));
            }
            const bool ok =
                dev[0] <= pin.bound10 && dev[1] <= pin.bound30 && dev[1] <= dev[0];
            all_ok = all_ok && ok;
            detail << "alpha " << pin.alpha << ": " << dev[0] << " @x=10, " << dev[1]
                   << " @x=30; ";
        }
        check(all_ok, "Sommerfeld vs quadrature oracle", detail.str());
    }

    // ---- closed-form equilibrium vs Newton, with bounds ----
    {
        int solver_bad = 0, bound_bad = 0;
        double worst = 0.0;
        for (int it = 0; it < 1000; ++it) {
            const auto ens = random_alpha1_ensemble(rng);
            const auto closed = equilibrium_closed_form_2d(ens);
            const auto newton = solve_equilibrium(ens);
            const double rel =
                std::max(std::abs(newton.temperature - closed.temperature) / closed.temperature,
                         std::abs(newton.chemical_potential - closed.chemical_potential) /
                             std::abs(closed.chemical_potential));
            worst = std::max(worst, rel);
            if (rel > 1e-10) ++solver_bad;
            double mu_lo = ens[0].chemical_potential, mu_hi = mu_lo;
            double t2_lo = ens[0].temperature * ens[0].temperature, t2_hi = t2_lo;
            double b_sum = 0.0, mu_m = 0.0, mu2_m = 0.0;
            for (const auto& r : ens) {
                mu_lo = std::min(mu_lo, r.chemical_potential);
                mu_hi = std::max(mu_hi, r.chemical_potential);
                t2_lo = std::min(t2_lo, r.temperature * r.temperature);
                t2_hi = std::max(t2_hi, r.temperature * r.temperature);
                b_sum += r.geometry.prefactor;
                mu_m += r.geometry.prefactor * r.chemical_potential;
                mu2_m += r.geometry.prefactor * r.chemical_potential * r.chemical_potential;
            }
            mu_m /= b_sum;
            mu2_m /= b_sum;
            const double disp = std::max(mu2_m - mu_m * mu_m, 0.0);
            const double teq2 = closed.temperature * closed.temperature;
            const double tol = 1e-12 * (1.0 + teq2);
            if (closed.chemical_potential < mu_lo - 1e-12 * std::abs(mu_lo) ||
                closed.chemical_potential > mu_hi + 1e-12 * std::abs(mu_hi) ||
                teq2 < t2_lo + disp / kPi2_3 - tol || teq2 > t2_hi + disp / kPi2_3 + tol)
                ++bound_bad;
        }
        check(solver_bad == 0, "Newton equals alpha=1 closed form (1000 ensembles)",
              "worst relative " + std::to_string(worst));
        check(bound_bad == 0, "equilibrium bounds (mu between, T^2 window)",
              "violations " + std::to_string(bound_bad));
    }

    // ---- chain rule: Eqs. for (T, x) reproduce dN/dt = -P, dE/dt = -J ----
    {
        int bad = 0, eq5_bad = 0;
        for (int it = 0; it < 2000; ++it) {
            const RandomEnsemble ens = random_ensemble(rng);
            const auto flows = stationary_flows_pairwise(ens.system, ens.reservoirs);
            const auto rates = ode_rhs(ens.system, ens.reservoirs, flows);
            const auto scales = flow_term_scales(ens.system, ens.reservoirs);
            for (std::size_t j = 0; j < ens.reservoirs.size(); ++j) {
                const auto& r = ens.reservoirs[j];
                const auto part = extensive_partials(r);
                const double t_dot = rates[j].temperature_rate;
                const double mu_dot = rates[j].x_rate * r.temperature + r.x() * t_dot;
                const double n_dot = part.dn_dtemperature * t_dot + part.dn_dmu * mu_dot;
                const double e_dot = part.de_dtemperature * t_dot + part.de_dmu * mu_dot;
                const auto close = [](double a, double b, double scale) {
                    const double mag = std::max(std::abs(a), std::abs(b));
                    return std::abs(a - b) <= 1e-9 * std::max(mag, 1e-3 * scale);
                };
                if (!close(n_dot, -flows.particle[j], scales.particle[j]) ||
                    !close(e_dot, -flows.energy[j], scales.energy[j]))
                    ++bad;
                // generic slow-dynamics route: solve the 2x2 system directly
                const double det = part.dn_dtemperature * part.de_dmu -
                                   part.dn_dmu * part.de_dtemperature;
                const double t_dot2 =
                    -(flows.particle[j] * part.de_dmu - flows.energy[j] * part.dn_dmu) / det;
                const double mu_dot2 = -(part.dn_dtemperature * flows.energy[j] -
                                         part.de_dtemperature * flows.particle[j]) /
                                       det;
                const double x_dot2 = (mu_dot2 - r.x() * t_dot2) / r.temperature;
                const double rate_scale =
                    std::max({std::abs(t_dot), std::abs(rates[j].x_rate), 1e-300});
                if (std::abs(t_dot2 - t_dot) > 1e-8 * std::max(std::abs(t_dot), 1e-6 * rate_scale) ||
                    std::abs(x_dot2 - rates[j].x_rate) >
                        1e-8 * std::max(std::abs(rates[j].x_rate), 1e-6 * rate_scale))
                    ++eq5_bad;
            }
        }
        check(bad == 0, "chain rule: (dT, dx) reconstructs (-P, -J)",
              "violations " + std::to_string(bad) + " of 2000 states");
        check(eq5_bad == 0, "matrix route equals closed-form rates",
              "violations " + std::to_string(eq5_bad));
    }

    // ---- zero flows iff common (T, mu); single-coordinate perturbations ----
    {
        int bad = 0;
        for (int it = 0; it < 200; ++it) {
            RandomStateOptions opts;
            opts.min_modes = 2;
            RandomEnsemble ens = random_ensemble(rng, opts);
            // collapse to a common state
            const double t0 = ens.reservoirs[0].temperature;
            const double mu0 = ens.reservoirs[0].chemical_potential;
            for (auto& r : ens.reservoirs) {
                r.temperature = t0;
                r.chemical_potential = mu0;
            }
            if (!ens.system.has_two_distinct_modes())
                ens.system.modes.push_back(ens.system.modes[0] + 1.0);
            const auto base = stationary_flows_pairwise(ens.system, ens.reservoirs);
            const auto scales = flow_term_scales(ens.system, ens.reservoirs);
            double base_max = 0.0, scale_max = 0.0;
            for (std::size_t j = 0; j < ens.reservoirs.size(); ++j) {
                base_max = std::max({base_max, std::abs(base.energy[j]),
                                     std::abs(base.particle[j])});
                scale_max = std::max({scale_max, scales.energy[j], scales.particle[j]});
            }
            if (base_max > 1e-13 * scale_max) ++bad;
            for (const double delta : {1e-3, 1e-6}) {
                const std::size_t j = std::size_t(unit(rng) * ens.reservoirs.size()) %
                                      ens.reservoirs.size();
                for (int coord = 0; coord < 2; ++coord) {
                    auto perturbed = ens.reservoirs;
                    if (coord == 0)
                        perturbed[j].temperature *= 1.0 + delta;
                    else
                        perturbed[j].chemical_potential *= 1.0 + delta;
                    const auto f = stationary_flows_pairwise(ens.system, perturbed);
                    double fmax = 0.0;
                    for (std::size_t q = 0; q < perturbed.size(); ++q)
                        fmax = std::max({fmax, std::abs(f.energy[q]), std::abs(f.particle[q])});
                    if (fmax <= 1e-13 * scale_max) ++bad;
                }
            }
        }
        check(bad == 0, "zero flows exactly at common (T, mu); perturbations detected",
              "violations " + std::to_string(bad));
    }

    // ---- occupancy bounds and monotonicity ----
    {
        int bad = 0;
        for (int it = 0; it < 500; ++it) {
            const double mu = 5.0 + 30.0 * unit(rng);
            const double t = 0.1 + 2.0 * unit(rng);
            double prev = 1.0;
            for (int k = 0; k <= 100; ++k) {
                const double w = mu - 10.0 * t + k * 0.6 * t;
                if (w <= 0.0) continue;
                const double n = fermi_occupancy(w, mu, t);
                if (!(n > 0.0 && n < 1.0) || n > prev) ++bad;
                prev = n;
            }
            const RandomEnsemble ens = random_ensemble(rng);
            for (const double w : ens.system.modes) {
                double lo = 1.0, hi = 0.0;
                for (const auto& r : ens.reservoirs) {
                    const double n = fermi_occupancy(w, r.chemical_potential, r.temperature);
                    lo = std::min(lo, n);
                    hi = std::max(hi, n);
                }
                const double nt = weighted_occupancy(w, ens.reservoirs);
                if (nt < lo - 1e-15 || nt > hi + 1e-15) ++bad;
            }
        }
        check(bad == 0, "occupancy in (0,1), decreasing; weighted occupancy bounded",
              "violations " + std::to_string(bad));
    }

    // ---- sign sanity: positive heat loss cools, wherever the leading term rules ----
    {
        int bad = 0, tested = 0;
        for (int it = 0; it < 2000; ++it) {
            const RandomEnsemble ens = random_ensemble(rng);
            const auto flows = stationary_flows_pairwise(ens.system, ens.reservoirs);
            const auto rates = ode_rhs(ens.system, ens.reservoirs, flows);
            for (std::size_t j = 0; j < ens.reservoirs.size(); ++j) {
                const auto& r = ens.reservoirs[j];
                const double x = r.x();
                const double a = r.geometry.alpha;
                if (x < 10.0 || flows.heat[j] <= 0.0) continue;
                // exact flip boundary: Q_{a-1} Y vs (pi^2/3)(a-1) T x^(a-2) P
                const double correction =
                    kPi2_3 * (a - 1.0) * r.temperature * std::pow(x, a - 2.0) *
                    std::abs(flows.particle[j]);
                if (sommerfeld_q(a - 1.0, x) * flows.heat[j] < 2.0 * correction) continue;
                ++tested;
                if (!(rates[j].temperature_rate < 0.0)) ++bad;
            }
        }
        check(bad == 0, "large-x: dominant positive heat loss implies cooling",
              std::to_string(tested) + " states tested, violations " + std::to_string(bad));
    }

    return report;
}

}  // namespace fermiflux
