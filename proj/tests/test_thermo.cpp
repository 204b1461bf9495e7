#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fermiflux/fermi_integral.hpp"
#include "fermiflux/flows.hpp"
#include "fermiflux/random_states.hpp"
#include "fermiflux/thermo.hpp"

using namespace fermiflux;

namespace {

constexpr double kPi2_3 = std::numbers::pi * std::numbers::pi / 3.0;

ReservoirState make_state(double t, double mu, double alpha = 1.5, double b = 1.0) {
    ReservoirState r;
    r.temperature = t;
    r.chemical_potential = mu;
    r.geometry.alpha = alpha;
    r.geometry.prefactor = b;
    r.coupling = {1e-4, alpha - 1.0};
    return r;
}

// N and E against the quadrature oracle: N = B a I(a-1), E = B a I(a)
double oracle_n(const ReservoirState& r) {
    return r.geometry.prefactor * r.geometry.alpha *
           fermi_integral(r.geometry.alpha - 1.0, r.chemical_potential, r.temperature);
}
double oracle_e(const ReservoirState& r) {
    return r.geometry.prefactor * r.geometry.alpha *
           fermi_integral(r.geometry.alpha, r.chemical_potential, r.temperature);
}

}  // namespace

TEST_CASE("Sommerfeld polynomial: alpha = 1 collapses, reference value") {
    CHECK(sommerfeld_q(1.0, 17.0) == doctest::Approx(17.0).epsilon(1e-15));
    CHECK(sommerfeld_q(1.5, 20.0) == doctest::Approx(89.718582929389924).epsilon(1e-14));
    for (double a : {1.0, 1.5, 3.0})
        for (double x : {5.0, 10.0, 40.0}) CHECK(sommerfeld_q(a, x) > 0.0);
}

TEST_CASE("particle count and energy content: closed forms at alpha = 1") {
    const auto r = make_state(0.8, 20.0, 1.0, 3.0);
    // N = B mu exactly (the correction term vanishes)
    CHECK(particle_count(r) == doctest::Approx(3.0 * 20.0).epsilon(1e-14));
    // E = (B/2)(x^2 + pi^2/3) T^2 with A V = B at alpha = 1
    const double x = 20.0 / 0.8;
    CHECK(energy_content(r) ==
          doctest::Approx(0.5 * 3.0 * (x * x + kPi2_3) * 0.8 * 0.8).epsilon(1e-14));
}

TEST_CASE("reference particle count at alpha = 3/2, x = 20") {
    const auto r = make_state(1.0, 20.0, 1.5, 1.0);
    CHECK(particle_count(r) == doctest::Approx(89.718582929389924).epsilon(1e-13));
    // quadrature agreement at this point
    CHECK(particle_count(r) == doctest::Approx(oracle_n(r)).epsilon(1e-4));
}

TEST_CASE("degenerate limit: E/N approaches alpha mu/(alpha+1)") {
    for (double a : {1.0, 1.5, 3.0}) {
        const auto r = make_state(1e-3, 10.0, a);
        const double ratio = energy_content(r) / particle_count(r);
        CHECK(ratio == doctest::Approx(a * 10.0 / (a + 1.0)).epsilon(1e-5));
    }
}

TEST_CASE("Sommerfeld domain errors") {
    auto r = make_state(1.0, 4.0);  // x = 4 < 5
    CHECK_THROWS_AS(particle_count(r), SommerfeldDomainError);
    CHECK_THROWS_AS(energy_content(r), SommerfeldDomainError);
    r.x_min = 3.5;
    CHECK(particle_count(r) > 0.0);
}

TEST_CASE("quadrature oracle: exact closed form at zero exponent") {
    // integral of the bare occupancy is T ln(1 + exp(mu/T))
    CHECK(fermi_integral(0.0, 13.0, 1.3) ==
          doctest::Approx(13.000059018568982).epsilon(1e-10));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> mu_d(5.0, 40.0), t_d(0.2, 3.0);
    for (int it = 0; it < 50; ++it) {
        const double mu = mu_d(rng), t = t_d(rng);
        const double exact = mu + t * std::log1p(std::exp(-mu / t));
        CHECK(fermi_integral(0.0, mu, t) == doctest::Approx(exact).epsilon(1e-10));
    }
}

TEST_CASE("quadrature oracle: particle-hole window defect is exponentially small") {
    // integral(n) - mu = T ln(1 + e^{-x}), the defect of the sharp-window picture
    const double mu = 16.0, t = 2.0;  // x = 8
    const double defect = fermi_integral(0.0, mu, t) - mu;
    CHECK(defect == doctest::Approx(t * std::log1p(std::exp(-8.0))).epsilon(1e-8));
    CHECK(defect < t * std::exp(-8.0) * 1.001);
}

TEST_CASE("quadrature oracle: input validation and tail bound") {
    CHECK_THROWS_AS(fermi_integral(-0.5, 10.0, 1.0), InvalidInputError);
    CHECK_THROWS_AS(fermi_integral(1.0, 10.0, 0.0), InvalidInputError);
    CHECK_THROWS_AS(fermi_integral(1.0, std::nan(""), 1.0), InvalidInputError);
    // the analytic tail bound dominates the true discarded tail:
    // for f_exponent = 0 the full integral is known exactly
    for (double x : {6.0, 12.0, 25.0}) {
        const double t = 1.0, mu = x;
        const double exact = mu + t * std::log1p(std::exp(-x));
        const double err = std::abs(fermi_integral(0.0, mu, t) - exact);
        CHECK(err <= fermi_integral_tail_bound(0.0, mu, t) + 1e-10 * exact);
        CHECK(fermi_integral_tail_bound(0.0, mu, t) < std::exp(-59.0) * t);
    }
}

TEST_CASE("Sommerfeld accuracy improves with x (quadrature as reference)") {
    // alpha = 3/2 pins quoted at x = 20 and the x = 40 < x = 10 comparison
    {
        const auto r20 = make_state(1.0, 20.0, 1.5);
        CHECK(std::abs(energy_content(r20) / oracle_e(r20) - 1.0) < 1e-4);
        const auto r10 = make_state(1.0, 10.0, 1.5);
        const auto r40 = make_state(1.0, 40.0, 1.5);
        const double d10 = std::abs(particle_count(r10) / oracle_n(r10) - 1.0);
        const double d40 = std::abs(particle_count(r40) / oracle_n(r40) - 1.0);
        CHECK(d40 < d10);
    }
    // strict decay along a grid while the deviation stays above the oracle floor
    const double floor = 1e-9;
    for (double a : {1.0, 1.5, 3.0}) {
        double prev_n = 1.0, prev_e = 1.0;
        for (double x : {8.0, 10.0, 12.0, 14.0}) {
            const auto r = make_state(1.0, x, a);
            const double dn = std::abs(particle_count(r) / oracle_n(r) - 1.0);
            const double de = std::abs(energy_content(r) / oracle_e(r) - 1.0);
            if (prev_n > floor && dn > floor) CHECK(dn < prev_n);
            if (prev_e > floor && de > floor) CHECK(de < prev_e);
            prev_n = dn;
            prev_e = de;
        }
    }
}

TEST_CASE("extensive partials match central finite differences") {
    std::mt19937_64 rng(13);
    for (int it = 0; it < 200; ++it) {
        const RandomEnsemble ens = random_ensemble(rng);
        for (const auto& r : ens.reservoirs) {
            const auto p = extensive_partials(r);
            const double ht = 1e-6 * r.temperature;
            const double hm = 1e-6 * r.chemical_potential;
            auto up = r, dn = r;
            up.temperature += ht;
            dn.temperature -= ht;
            CHECK(p.dn_dtemperature ==
                  doctest::Approx((particle_count(up) - particle_count(dn)) / (2 * ht))
                      .epsilon(1e-6));
            CHECK(p.de_dtemperature ==
                  doctest::Approx((energy_content(up) - energy_content(dn)) / (2 * ht))
                      .epsilon(1e-6));
            up = dn = r;
            up.chemical_potential += hm;
            dn.chemical_potential -= hm;
            CHECK(p.dn_dmu ==
                  doctest::Approx((particle_count(up) - particle_count(dn)) / (2 * hm))
                      .epsilon(1e-6));
            CHECK(p.de_dmu ==
                  doctest::Approx((energy_content(up) - energy_content(dn)) / (2 * hm))
                      .epsilon(1e-6));
        }
    }
}

TEST_CASE("reference slow-dynamics rates (B = 100 two-reservoir state)") {
    SystemSpec sys;
    sys.modes = {21.1, 21.5};
    const ReservoirState res[] = {make_state(0.6, 20.8, 1.5, 100.0),
                                  make_state(1.0, 16.0, 1.5, 100.0)};
    const auto rates = ode_rhs(sys, res);
    CHECK(rates[0].temperature_rate == doctest::Approx(-4.4092983377962029e-8).epsilon(1e-12));
    CHECK(rates[0].x_rate == doctest::Approx(2.2112816351523713e-6).epsilon(1e-12));
    CHECK(rates[1].temperature_rate == doctest::Approx(3.6510514691795019e-7).epsilon(1e-12));
    CHECK(rates[1].x_rate == doctest::Approx(-5.6465244963816950e-6).epsilon(1e-12));
}

TEST_CASE("equilibrium state has exactly zero rates") {
    SystemSpec sys;
    sys.modes = {18.0, 21.0};
    const ReservoirState res[] = {make_state(0.9, 19.0, 1.5, 50.0),
                                  make_state(0.9, 19.0, 3.0, 20.0)};
    const auto rates = ode_rhs(sys, res);
    for (const auto& r : rates) {
        CHECK(r.temperature_rate == 0.0);
        CHECK(r.x_rate == 0.0);
    }
}

TEST_CASE("chain rule: rates reconstruct dN/dt = -P and dE/dt = -J") {
    std::mt19937_64 rng(19);
    for (int it = 0; it < 500; ++it) {
        const RandomEnsemble ens = random_ensemble(rng);
        const auto flows = stationary_flows_pairwise(ens.system, ens.reservoirs);
        const auto rates = ode_rhs(ens.system, ens.reservoirs, flows);
        const auto scales = flow_term_scales(ens.system, ens.reservoirs);
        for (std::size_t j = 0; j < ens.reservoirs.size(); ++j) {
            const auto& r = ens.reservoirs[j];
            const auto p = extensive_partials(r);
            const double mu_dot =
                rates[j].x_rate * r.temperature + r.x() * rates[j].temperature_rate;
            const double n_dot = p.dn_dtemperature * rates[j].temperature_rate +
                                 p.dn_dmu * mu_dot;
            const double e_dot = p.de_dtemperature * rates[j].temperature_rate +
                                 p.de_dmu * mu_dot;
            CHECK(std::abs(n_dot + flows.particle[j]) <=
                  1e-9 * std::max(std::abs(flows.particle[j]), 1e-3 * scales.particle[j]));
            CHECK(std::abs(e_dot + flows.energy[j]) <=
                  1e-9 * std::max(std::abs(flows.energy[j]), 1e-3 * scales.energy[j]));
        }
    }
}

TEST_CASE("matrix route: inverting the extensive Jacobian matches the closed rates") {
    std::mt19937_64 rng(31);
    for (int it = 0; it < 500; ++it) {
        const RandomEnsemble ens = random_ensemble(rng);
        const auto flows = stationary_flows_pairwise(ens.system, ens.reservoirs);
        const auto rates = ode_rhs(ens.system, ens.reservoirs, flows);
        for (std::size_t j = 0; j < ens.reservoirs.size(); ++j) {
            const auto& r = ens.reservoirs[j];
            const auto p = extensive_partials(r);
            const double det = p.dn_dtemperature * p.de_dmu - p.dn_dmu * p.de_dtemperature;
            const double t_dot =
                -(flows.particle[j] * p.de_dmu - flows.energy[j] * p.dn_dmu) / det;
            const double mu_dot = -(p.dn_dtemperature * flows.energy[j] -
                                    p.de_dtemperature * flows.particle[j]) /
                                  det;
            const double x_dot = (mu_dot - r.x() * t_dot) / r.temperature;
            const double rate_scale =
                std::max({std::abs(rates[j].temperature_rate), std::abs(rates[j].x_rate)});
            CHECK(std::abs(t_dot - rates[j].temperature_rate) <=
                  1e-8 * std::max(std::abs(rates[j].temperature_rate), 1e-6 * rate_scale));
            CHECK(std::abs(x_dot - rates[j].x_rate) <=
                  1e-8 * std::max(std::abs(rates[j].x_rate), 1e-6 * rate_scale));
        }
    }
}

TEST_CASE("large-x approximation: dT/dt ~ -Y/(A~ V T^a x^(a-1)) within 5%") {
    SystemSpec sys;
    sys.modes = {16.0, 16.5};
    // x_1 = 30, heat flow clearly nonzero
    const ReservoirState res[] = {make_state(0.5, 15.0, 1.5, 100.0),
                                  make_state(0.8, 14.0, 1.5, 100.0)};
    const auto flows = stationary_flows_pairwise(sys, res);
    REQUIRE(std::abs(flows.heat[0]) > 0.0);
    const auto rates = ode_rhs(sys, res, flows);
    const double atv = 100.0 * 1.5 * kPi2_3;
    const double approx =
        -flows.heat[0] / (atv * std::pow(0.5, 1.5) * std::pow(30.0, 0.5));
    CHECK(rates[0].temperature_rate == doctest::Approx(approx).epsilon(0.05));
}

TEST_CASE("singular extensive Jacobian is reported") {
    SystemSpec sys;
    sys.modes = {10.0};
    // x^2 = pi^2 alpha (alpha-1)/6 exactly at alpha = 3, x = pi
    ReservoirState r1 = make_state(1.0, std::numbers::pi, 3.0, 1.0);
    r1.x_min = 3.0;
    ReservoirState r2 = make_state(1.0, 8.0, 1.5, 1.0);
    const ReservoirState res[] = {r1, r2};
    CHECK_THROWS_AS(ode_rhs(sys, res), SingularJacobianError);
}
