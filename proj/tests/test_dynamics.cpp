#include <doctest.h>

#include <cmath>
#include <random>

#include "fermiflux/dopri5.hpp"
#include "fermiflux/dynamics.hpp"
#include "fermiflux/equilibrium.hpp"
#include "fermiflux/occupancy.hpp"

using namespace fermiflux;

namespace {

ReservoirState make_state(double t, double mu, double g0 = 1e-2, double p = 0.5,
                          double b = 1.0) {
    ReservoirState r;
    r.temperature = t;
    r.chemical_potential = mu;
    r.geometry.alpha = 1.5;
    r.geometry.prefactor = b;
    r.coupling = {g0, p};
    return r;
}

// small fast-relaxing system so unit tests stay in the millisecond range
struct FastScenario {
    SystemSpec sys;
    std::vector<ReservoirState> res;

    FastScenario() {
        sys.modes = {21.1, 21.5};
        res = {make_state(0.6, 20.8), make_state(1.0, 16.0)};
    }
};

}  // namespace

TEST_CASE("dopri5: exponential decay to tolerance, dense output consistent") {
    Dopri5Options opts;
    opts.rtol = 1e-9;
    opts.atol = 1e-12;
    Dopri5 stepper([](double, std::span<const double> y,
                      std::span<double> dydt) { dydt[0] = -y[0]; },
                   0.0, {1.0}, opts);
    double worst_dense = 0.0;
    while (stepper.advance(10.0)) {
        const auto& seg = stepper.segment();
        for (int k = 1; k < 8; ++k) {
            const double t = seg.t_begin() + seg.h * k / 8.0;
            worst_dense = std::max(
                worst_dense, std::abs(seg.evaluate_component(t, 0) - std::exp(-t)));
        }
    }
    CHECK(stepper.t() == 10.0);
    CHECK(stepper.y()[0] == doctest::Approx(std::exp(-10.0)).epsilon(1e-6));
    CHECK(worst_dense < 1e-7);
    // FSAL derivative at the final point
    CHECK(stepper.derivative()[0] == doctest::Approx(-stepper.y()[0]).epsilon(1e-12));
}

TEST_CASE("dopri5: two-component oscillator keeps the invariant circle") {
    Dopri5Options opts;
    opts.rtol = 1e-10;
    opts.atol = 1e-14;
    Dopri5 stepper(
        [](double, std::span<const double> y, std::span<double> dydt) {
            dydt[0] = y[1];
            dydt[1] = -y[0];
        },
        0.0, {1.0, 0.0}, opts);
    while (stepper.advance(20.0)) {
    }
    const double r2 = stepper.y()[0] * stepper.y()[0] + stepper.y()[1] * stepper.y()[1];
    CHECK(r2 == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(stepper.y()[0] == doctest::Approx(std::cos(20.0)).epsilon(1e-6));
}

TEST_CASE("dopri5: a permanently rejected step raises the stiffness error") {
    Dopri5Options opts;
    Dopri5 stepper([](double, std::span<const double>,
                      std::span<double> dydt) { dydt[0] = 1.0; },
                   0.0, {0.0}, opts);
    bool first = true;
    Dopri5 rejecting(
        [&first](double t, std::span<const double>, std::span<double> dydt) {
            if (t > 0.0) throw StepOutsideDomain{};  // allow only the t = 0 evaluation
            dydt[0] = 1.0;
            first = false;
        },
        0.0, {0.0}, opts);
    CHECK_THROWS_AS(rejecting.advance(1.0), StiffnessError);
}

TEST_CASE("integration options are validated") {
    FastScenario f;
    IntegrationOptions opts;
    opts.rtol = 1e-2;
    CHECK_THROWS_AS(integrate(f.sys, f.res, opts), InvalidInputError);
    opts.rtol = 1e-9;
    opts.t_end = -1.0;
    CHECK_THROWS_AS(integrate(f.sys, f.res, opts), InvalidInputError);
}

TEST_CASE("integrate: equilibrium start is flat and terminates immediately") {
    SystemSpec sys;
    sys.modes = {18.0, 19.0};
    const ReservoirState res[] = {make_state(0.9, 18.5), make_state(0.9, 18.5)};
    const auto traj = integrate(sys, res);
    CHECK(traj.reached_equilibrium);
    CHECK(traj.t_final == 0.0);
    CHECK(traj.events.empty());
    CHECK(traj.min_cold_ratio == 1.0);
    for (const auto& p : traj.samples) {
        CHECK(p.temperature[0] == 0.9);
        CHECK(p.flows.sigma == 0.0);
    }
}

TEST_CASE("integrate: relaxation run satisfies every trajectory invariant") {
    FastScenario f;
    IntegrationOptions opts;
    opts.rtol = 1e-9;
    opts.t_end = 1e9;
    opts.n_samples = 300;
    const auto traj = integrate(f.sys, f.res, opts);

    REQUIRE(traj.steps.size() > 10);
    const auto& first = traj.steps.front();
    double prev_t = -1.0;
    for (const auto& p : traj.steps) {
        CHECK(p.time > prev_t);
        prev_t = p.time;
        CHECK(p.flows.sigma >= -slot_slack(p.flows, f.res));
        CHECK(std::abs(p.total_n - first.total_n) / first.total_n <= 1e-6);
        CHECK(std::abs(p.total_e - first.total_e) / first.total_e <= 1e-6);
    }
    // samples: first row is the untouched initial state
    CHECK(traj.samples.front().time == 0.0);
    CHECK(traj.samples.front().temperature[0] == 0.6);
    CHECK(traj.samples.front().chemical_potential[1] == 16.0);
    CHECK(traj.samples.size() == 300);
    // transient cooling of the cold reservoir
    CHECK(traj.min_cold_ratio < 1.0);
    CHECK(traj.coldest == 0);

    // final state vs the conservation solver
    const auto eq = solve_equilibrium(f.res);
    const auto& last = traj.steps.back();
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(last.temperature[j] == doctest::Approx(eq.temperature).epsilon(1e-6));
        CHECK(last.chemical_potential[j] ==
              doctest::Approx(eq.chemical_potential).epsilon(1e-6));
    }
    // sigma decays toward equilibrium
    CHECK(last.flows.sigma < first.flows.sigma);
}

TEST_CASE("integrate: halving rtol moves the result less than the error estimate") {
    FastScenario f;
    IntegrationOptions opts;
    opts.rtol = 1e-7;
    opts.t_end = 3e6;  // stop well before equilibrium so the comparison is meaningful
    opts.n_samples = 2;
    const auto a = integrate(f.sys, f.res, opts);
    opts.rtol = 0.5e-7;
    const auto b = integrate(f.sys, f.res, opts);
    const auto& pa = a.steps.back();
    const auto& pb = b.steps.back();
    double diff = 0.0;
    for (std::size_t j = 0; j < 2; ++j) {
        diff = std::max(diff, std::abs(pa.temperature[j] - pb.temperature[j]));
        diff = std::max(diff, std::abs(pa.x[j] - pb.x[j]));
    }
    CHECK(diff < a.accumulated_error_estimate + b.accumulated_error_estimate);
}

TEST_CASE("integrate: leaving the configured validity domain is an error") {
    FastScenario f;
    for (auto& r : f.res) r.x_min = 12.0;  // the trajectory dips to x ~ 9.2
    IntegrationOptions opts;
    opts.t_end = 1e9;
    CHECK_THROWS_AS(integrate(f.sys, f.res, opts), SommerfeldDomainError);
}

TEST_CASE("event detector: synthetic crossings are bisected to the exact instant") {
    SystemSpec sys;
    sys.modes = {17.1, 17.5};
    EventDetector det(sys, 2, 1e-9);

    // linear synthetic trajectory in [T1, x1, T2, x2]
    const auto state = [](double t, std::span<double> y) {
        const double t1 = 0.8 + 1e-4 * t;   // crosses T2 = 1.0 at t = 2000
        const double t2 = 1.0;
        const double mu1 = 18.8 - 2e-4 * t;  // crosses mu2 = 18.0 at t = 4000
        const double mu2 = 18.0;
        y[0] = t1;
        y[1] = mu1 / t1;
        y[2] = t2;
        y[3] = mu2 / t2;
    };
    std::vector<double> y(4);
    state(0.0, y);
    det.prime(0.0, y);
    std::vector<Event> events;
    for (double t = 500.0; t <= 6000.0; t += 500.0) {
        state(t, y);
        det.observe(t, y, state, events);
    }
    REQUIRE(events.size() >= 3);
    bool saw_tswap = false, saw_singular = false, saw_muswap = false;
    for (const auto& e : events) {
        if (e.kind == EventKind::temperature_order_swap) {
            saw_tswap = true;
            CHECK(e.time == doctest::Approx(2000.0).epsilon(1e-9));
            CHECK(std::abs(e.temperature_first - e.temperature_second) <
                  1e-9 * e.temperature_first);
        }
        if (e.kind == EventKind::crossover_singularity) {
            saw_singular = true;
            CHECK(e.time == doctest::Approx(2000.0).epsilon(1e-9));
        }
        if (e.kind == EventKind::chemical_potential_order_swap) {
            saw_muswap = true;
            CHECK(e.time == doctest::Approx(4000.0).epsilon(1e-9));
            // at the swap the crossover frequency equals the common mu
            CHECK(e.crossover == doctest::Approx(e.mu_first).epsilon(1e-9));
        }
    }
    CHECK(saw_tswap);
    CHECK(saw_singular);
    CHECK(saw_muswap);
}

TEST_CASE("event detector: noise-band flicker does not emit") {
    SystemSpec sys;
    sys.modes = {17.1, 17.5};
    EventDetector det(sys, 2, 1e-9);
    // T difference flickers at 1e-8 around zero: inside the 1e3*rtol*T band
    const auto state = [](double t, std::span<double> y) {
        y[0] = 1.0 + (std::fmod(t, 2.0) < 1.0 ? 1e-8 : -1e-8);
        y[1] = 18.0 / y[0];
        y[2] = 1.0;
        y[3] = 18.0;
    };
    std::vector<double> y(4);
    state(0.0, y);
    det.prime(0.0, y);
    std::vector<Event> events;
    for (double t = 1.0; t < 50.0; t += 1.0) {
        state(t, y);
        det.observe(t, y, state, events);
    }
    CHECK(events.empty());
}

TEST_CASE("mode occupation relaxation: fixed point, single-reservoir rate") {
    SystemSpec sys;
    sys.modes = {21.1, 21.5};
    const ReservoirState res[] = {make_state(0.6, 20.8, 1e-4), make_state(1.0, 16.0, 1e-4)};

    // starting at the weighted occupancy stays there
    std::vector<double> fixed = {weighted_occupancy(21.1, res),
                                 weighted_occupancy(21.5, res)};
    const auto flat = mode_occupation_relaxation(sys, res, fixed);
    for (const auto& row : flat.occupancy) {
        CHECK(row[0] == doctest::Approx(fixed[0]).epsilon(1e-10));
        CHECK(row[1] == doctest::Approx(fixed[1]).epsilon(1e-10));
    }
    CHECK(flat.fixed_point[0] == doctest::Approx(fixed[0]).epsilon(1e-14));

    // one reservoir: exponential relaxation to n_1 at rate gamma_1
    const ReservoirState solo[] = {make_state(0.6, 20.8, 1e-4)};
    const double n0[] = {0.9, 0.1};
    const auto relax = mode_occupation_relaxation(sys, solo, n0, 0.0, 60);
    for (std::size_t k = 0; k < 2; ++k) {
        const double target = fermi_occupancy(sys.modes[k], 20.8, 0.6);
        const double rate = solo[0].gamma(sys.modes[k]);
        CHECK(relax.rate[k] == doctest::Approx(rate).epsilon(1e-14));
        for (std::size_t i = 0; i < relax.times.size(); ++i) {
            const double expect =
                target + (n0[k] - target) * std::exp(-rate * relax.times[i]);
            CHECK(relax.occupancy[i][k] == doctest::Approx(expect).epsilon(1e-8));
        }
    }
}

TEST_CASE("mode occupation relaxation: input validation") {
    SystemSpec sys;
    sys.modes = {21.1};
    const ReservoirState res[] = {make_state(0.6, 20.8)};
    const double bad[] = {1.5};
    CHECK_THROWS_AS(mode_occupation_relaxation(sys, res, bad), InvalidInputError);
    const double wrong_len[] = {0.5, 0.5};
    CHECK_THROWS_AS(mode_occupation_relaxation(sys, res, wrong_len), InvalidInputError);
}
