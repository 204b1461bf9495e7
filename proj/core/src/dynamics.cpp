#include "fermiflux/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fermiflux/dopri5.hpp"
#include "fermiflux/occupancy.hpp"
#include "fermiflux/thermo.hpp"

namespace fermiflux {

namespace {

constexpr double kPi2_6 = std::numbers::pi * std::numbers::pi / 6.0;
constexpr std::size_t kStepStorageBudget = 131072;  // invariants are checked online

double raw_particle_count(const ReservoirState& r) {
    const double a = r.geometry.alpha;
    return r.geometry.prefactor * sommerfeld_q(a, r.x()) * std::pow(r.temperature, a);
}

double raw_energy_content(const ReservoirState& r) {
    const double a = r.geometry.alpha;
    return r.geometry.prefactor * a / (a + 1.0) * sommerfeld_q(a + 1.0, r.x()) *
           std::pow(r.temperature, a + 1.0);
}

// Flat storage of every accepted step's dense polynomial, binary-searchable by time.
struct SegmentPool {
    std::size_t n = 0;
    std::vector<double> t0;     // per step
    std::vector<double> h;      // per step
    std::vector<double> coeff;  // 5n doubles per step: r1 r2 r3 r4 r5

    void push(const DenseSegment& seg) {
        t0.push_back(seg.t0);
        h.push_back(seg.h);
        coeff.insert(coeff.end(), seg.r1.begin(), seg.r1.end());
        coeff.insert(coeff.end(), seg.r2.begin(), seg.r2.end());
        coeff.insert(coeff.end(), seg.r3.begin(), seg.r3.end());
        coeff.insert(coeff.end(), seg.r4.begin(), seg.r4.end());
        coeff.insert(coeff.end(), seg.r5.begin(), seg.r5.end());
    }

    void evaluate(double t, std::span<double> out) const {
        auto it = std::upper_bound(t0.begin(), t0.end(), t);
        std::size_t idx = (it == t0.begin()) ? 0 : std::size_t(it - t0.begin()) - 1;
        idx = std::min(idx, t0.size() - 1);
        const double* base = coeff.data() + idx * 5 * n;
        const double theta = std::clamp((t - t0[idx]) / h[idx], 0.0, 1.0);
        const double theta1 = 1.0 - theta;
        for (std::size_t i = 0; i < n; ++i) {
            const double r1 = base[i], r2 = base[n + i], r3 = base[2 * n + i],
                         r4 = base[3 * n + i], r5 = base[4 * n + i];
            out[i] = r1 + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
        }
    }
};

struct FixedLayout {
    std::vector<ReservoirGeometry> geometry;
    std::vector<SpectralCoupling> coupling;
    std::vector<double> x_min;
};

void states_from_y(const FixedLayout& fixed, std::span<const double> y,
                   std::vector<ReservoirState>& out) {
    const std::size_t n = fixed.geometry.size();
    out.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        out[j].temperature = y[2 * j];
        out[j].chemical_potential = y[2 * j + 1] * y[2 * j];
        out[j].geometry = fixed.geometry[j];
        out[j].coupling = fixed.coupling[j];
        out[j].x_min = fixed.x_min[j];
    }
}

TrajectoryPoint make_point(const SystemSpec& sys, std::span<const ReservoirState> states,
                           double t) {
    const std::size_t n = states.size();
    TrajectoryPoint p;
    p.time = t;
    p.temperature.resize(n);
    p.chemical_potential.resize(n);
    p.x.resize(n);
    p.total_n = 0.0;
    p.total_e = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        p.temperature[j] = states[j].temperature;
        p.chemical_potential[j] = states[j].chemical_potential;
        p.x[j] = states[j].x();
        p.total_n += raw_particle_count(states[j]);
        p.total_e += raw_energy_content(states[j]);
    }
    p.flows = stationary_flows_pairwise(sys, states);
    p.crossover.reserve(n * (n - 1) / 2);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            const auto w = crossover_frequency(states[a], states[b]);
            p.crossover.push_back(w ? *w : std::numeric_limits<double>::quiet_NaN());
        }
    return p;
}

}  // namespace

void IntegrationOptions::validate() const {
    if (!(rtol >= 1e-12 && rtol <= 1e-3))
        throw InvalidInputError("integration: rtol must lie in [1e-12, 1e-3]");
    if (!(t_end > 0.0) || !std::isfinite(t_end))
        throw InvalidInputError("integration: t_end must be positive and finite");
    if (n_samples < 1) throw InvalidInputError("integration: n_samples must be >= 1");
    if (!(equilibrium_threshold > 0.0))
        throw InvalidInputError("integration: equilibrium_threshold must be positive");
    if (max_steps < 1) throw InvalidInputError("integration: max_steps must be >= 1");
}

const char* to_string(EventKind kind) {
    switch (kind) {
        case EventKind::temperature_order_swap: return "temperature-order-swap";
        case EventKind::chemical_potential_order_swap: return "chemical-potential-order-swap";
        case EventKind::crossover_sign_change: return "crossover-sign-change";
        case EventKind::crossover_singularity: return "crossover-singularity";
        case EventKind::mode_crossover_entry: return "mode-crossover-entry";
    }
    return "unknown";
}

EventDetector::EventDetector(const SystemSpec& sys, std::size_t n_reservoirs, double rtol)
    : n_(n_reservoirs), rtol_(rtol), scratch_(2 * n_reservoirs) {
    omega_min_ = *std::min_element(sys.modes.begin(), sys.modes.end());
    omega_max_ = *std::max_element(sys.modes.begin(), sys.modes.end());
    for (std::size_t a = 0; a + 1 < n_; ++a)
        for (std::size_t b = a + 1; b < n_; ++b)
            for (int kind = 0; kind < 4; ++kind)
                monitors_.push_back({kind, static_cast<int>(a), static_cast<int>(b)});
}

double EventDetector::value(const Monitor& m, std::span<const double> y) const {
    const double ta = y[2 * m.a], tb = y[2 * m.b];
    const double ma = y[2 * m.a + 1] * ta, mb = y[2 * m.b + 1] * tb;
    switch (m.kind) {
        case 0: return ta - tb;            // temperature order / crossover singularity
        case 1: return ma - mb;            // chemical-potential order
        case 2: return ta * mb - tb * ma;  // crossover numerator: omega~ zero crossing
        default: {                         // inside (omega_min, omega_max) indicator
            const double den = ta - tb;
            // a near-singular crossover counts as outside the window
            if (std::abs(den) <= 1e3 * rtol_ * std::max(ta, tb))
                return -(omega_max_ - omega_min_);
            const double wt = (ta * mb - tb * ma) / den;
            return std::min(wt - omega_min_, omega_max_ - wt);
        }
    }
}

double EventDetector::band(const Monitor& m, std::span<const double> y) const {
    const double ta = y[2 * m.a], tb = y[2 * m.b];
    const double ma = std::abs(y[2 * m.a + 1] * ta), mb = std::abs(y[2 * m.b + 1] * tb);
    const double noise = 1e3 * rtol_;
    switch (m.kind) {
        case 0: return noise * std::max(ta, tb);
        case 1: return noise * std::max(ma, mb);
        case 2: return noise * (ta * mb + tb * ma);
        default: return noise * omega_max_;
    }
}

void EventDetector::prime(double t0, std::span<const double> y0) {
    for (auto& m : monitors_) {
        const double f = value(m, y0);
        m.confirmed = std::abs(f) > band(m, y0) ? (f > 0.0 ? 1 : -1) : 0;
        m.t_confirmed = t0;
    }
}

void EventDetector::observe(double t, std::span<const double> y, const DenseEval& dense,
                            std::vector<Event>& out) {
    for (auto& m : monitors_) {
        const double f = value(m, y);
        if (std::abs(f) <= band(m, y)) continue;  // still inside the noise band
        const int sign = f > 0.0 ? 1 : -1;
        if (m.confirmed != 0 && sign != m.confirmed) {
            // bisect the raw monitor between the two confirmed states
            double lo = m.t_confirmed, hi = t;
            double f_lo_sign = m.confirmed;
            const double width = hi - lo;
            for (int i = 0; i < 80 && (hi - lo) > 1e-13 * width; ++i) {
                const double mid = 0.5 * (lo + hi);
                dense(mid, scratch_);
                const double fm = value(m, scratch_);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((fm > 0.0 ? 1 : -1) == f_lo_sign)
                    lo = mid;
                else
                    hi = mid;
            }
            const double tc = 0.5 * (lo + hi);
            dense(tc, scratch_);
            Event ev{EventKind::temperature_order_swap, tc, m.a, m.b};
            ev.temperature_first = scratch_[2 * m.a];
            ev.temperature_second = scratch_[2 * m.b];
            ev.mu_first = scratch_[2 * m.a + 1] * ev.temperature_first;
            ev.mu_second = scratch_[2 * m.b + 1] * ev.temperature_second;
            const double den = ev.temperature_first - ev.temperature_second;
            ev.crossover = std::abs(den) <= 1e-14 * std::max(ev.temperature_first,
                                                             ev.temperature_second)
                               ? std::numeric_limits<double>::quiet_NaN()
                               : (ev.temperature_first * ev.mu_second -
                                  ev.temperature_second * ev.mu_first) /
                                     den;
            switch (m.kind) {
                case 0:
                    ev.kind = EventKind::temperature_order_swap;
                    out.push_back(ev);
                    ev.kind = EventKind::crossover_singularity;
                    out.push_back(ev);
                    break;
                case 1:
                    ev.kind = EventKind::chemical_potential_order_swap;
                    out.push_back(ev);
                    break;
                case 2:
                    ev.kind = EventKind::crossover_sign_change;
                    out.push_back(ev);
                    break;
                default:
                    if (sign > 0) {  // entries into the mode window only
                        ev.kind = EventKind::mode_crossover_entry;
                        out.push_back(ev);
                    }
                    break;
            }
        }
        m.confirmed = sign;
        m.t_confirmed = t;
    }
}

Trajectory integrate(const SystemSpec& sys, std::span<const ReservoirState> initial,
                     const IntegrationOptions& opts) {
    opts.validate();
    sys.validate();
    if (initial.size() < 2) throw InvalidInputError("integrate: need at least two reservoirs");
    for (const auto& r : initial) r.validate();
    const std::size_t n = initial.size();

    // Initial rates; genuine problems at t = 0 (singular Jacobian, domain) surface here.
    const FlowSet flows0 = stationary_flows_pairwise(sys, initial);
    const auto rates0 = ode_rhs(sys, initial, flows0);
    double rate_scale0 = 0.0;
    for (const auto& r : rates0)
        rate_scale0 =
            std::max({rate_scale0, std::abs(r.temperature_rate), std::abs(r.x_rate)});
    const double sigma0 = flows0.sigma;

    Trajectory traj;
    traj.n_reservoirs = n;
    traj.coldest = 0;
    for (std::size_t j = 1; j < n; ++j)
        if (initial[j].temperature < initial[traj.coldest].temperature)
            traj.coldest = static_cast<int>(j);
    const double t_cold0 = initial[traj.coldest].temperature;

    std::vector<ReservoirState> init_copy(initial.begin(), initial.end());
    TrajectoryPoint p0 = make_point(sys, init_copy, 0.0);
    const double n_total0 = p0.total_n;
    const double e_total0 = p0.total_e;
    traj.steps.push_back(p0);

    if (rate_scale0 == 0.0) {
        // already at the fixed point: flat trajectory
        traj.samples.push_back(p0);
        traj.reached_equilibrium = true;
        traj.t_final = 0.0;
        traj.min_cold_ratio = 1.0;
        return traj;
    }
    const double rate_threshold = opts.equilibrium_threshold * rate_scale0;
    const double sigma_threshold = opts.equilibrium_threshold * sigma0;

    FixedLayout fixed;
    std::vector<double> y0(2 * n);
    for (std::size_t j = 0; j < n; ++j) {
        fixed.geometry.push_back(initial[j].geometry);
        fixed.coupling.push_back(initial[j].coupling);
        fixed.x_min.push_back(initial[j].x_min);
        y0[2 * j] = initial[j].temperature;
        y0[2 * j + 1] = initial[j].x();
    }

    std::vector<ReservoirState> scratch_states;
    auto rhs = [&](double /*t*/, std::span<const double> y, std::span<double> dydt) {
        for (std::size_t j = 0; j < n; ++j) {
            const double t_j = y[2 * j], x_j = y[2 * j + 1];
            if (!std::isfinite(t_j) || !std::isfinite(x_j) || t_j <= 0.0 || x_j < kHardXMin)
                throw StepOutsideDomain{};
        }
        states_from_y(fixed, y, scratch_states);
        try {
            const FlowSet flows = stationary_flows_pairwise(sys, scratch_states);
            const auto rates = ode_rhs(sys, scratch_states, flows);
            for (std::size_t j = 0; j < n; ++j) {
                dydt[2 * j] = rates[j].temperature_rate;
                dydt[2 * j + 1] = rates[j].x_rate;
            }
        } catch (const SingularJacobianError&) {
            // near-singular trial state: shrink the step instead of giving up
            throw StepOutsideDomain{};
        }
    };

    Dopri5Options dopts;
    dopts.rtol = opts.rtol;
    dopts.atol = 0.0;
    dopts.max_steps = opts.max_steps;
    Dopri5 stepper(rhs, 0.0, y0, dopts);

    SegmentPool pool;
    pool.n = 2 * n;
    EventDetector detector(sys, n, opts.rtol);
    detector.prime(0.0, y0);
    const auto pool_dense = [&pool](double t, std::span<double> y) { pool.evaluate(t, y); };

    double min_cold = t_cold0;
    std::size_t step_stride = 1;
    std::size_t accepted = 0;
    std::vector<ReservoirState> states;

    while (stepper.t() < opts.t_end) {
        if (!stepper.advance(opts.t_end)) break;
        ++accepted;
        const DenseSegment& seg = stepper.segment();
        pool.push(seg);

        states_from_y(fixed, stepper.y(), states);
        for (std::size_t j = 0; j < n; ++j) {
            if (states[j].x() < states[j].x_min) {
                std::ostringstream os;
                os << "integrate: reservoir " << (j + 1)
                   << " left the Sommerfeld validity domain at t = " << stepper.t()
                   << ": x = " << states[j].x() << " < x_min = " << states[j].x_min;
                throw SommerfeldDomainError(os.str());
            }
        }

        TrajectoryPoint pt = make_point(sys, states, stepper.t());

        const double slack = slot_slack(pt.flows, states);
        if (pt.flows.sigma < -slack) {
            std::ostringstream os;
            os << "integrate: second law violated at t = " << stepper.t()
               << ": sigma = " << pt.flows.sigma << " < -" << slack;
            throw IntegrityError(os.str());
        }
        const double drift_n = std::abs(pt.total_n - n_total0) / n_total0;
        const double drift_e = std::abs(pt.total_e - e_total0) / e_total0;
        if (drift_n > 1e-6 || drift_e > 1e-6) {
            std::ostringstream os;
            os << "integrate: conservation drift exceeded 1e-6 at t = " << stepper.t()
               << ": dN/N = " << drift_n << ", dE/E = " << drift_e;
            throw IntegrityError(os.str());
        }

        detector.observe(stepper.t(), stepper.y(), pool_dense, traj.events);

        // track the coldest reservoir between grid points too
        const std::size_t cold_idx = 2 * static_cast<std::size_t>(traj.coldest);
        for (int k = 0; k <= 32; ++k) {
            const double tk = seg.t_begin() + seg.h * (k / 32.0);
            min_cold = std::min(min_cold, seg.evaluate_component(tk, cold_idx));
        }

        const double sigma_here = pt.flows.sigma;
        if (accepted % step_stride == 0) {
            traj.steps.push_back(std::move(pt));
            if (traj.steps.size() > kStepStorageBudget) {
                // halve the retained set; invariants were already checked online
                std::vector<TrajectoryPoint> kept;
                kept.reserve(traj.steps.size() / 2 + 1);
                for (std::size_t i = 0; i < traj.steps.size(); i += 2)
                    kept.push_back(std::move(traj.steps[i]));
                traj.steps = std::move(kept);
                step_stride *= 2;
            }
        }

        double max_rate = 0.0;
        for (const double d : stepper.derivative()) max_rate = std::max(max_rate, std::abs(d));
        if (max_rate <= rate_threshold && sigma_here <= sigma_threshold) {
            traj.reached_equilibrium = true;
            break;
        }
    }

    traj.t_final = stepper.t();
    traj.n_accepted = stepper.accepted_steps();
    traj.n_rejected = stepper.rejected_steps();
    traj.accumulated_error_estimate = stepper.accumulated_error();
    if (traj.steps.back().time != traj.t_final) {
        states_from_y(fixed, stepper.y(), states);
        traj.steps.push_back(make_point(sys, states, traj.t_final));
    }
    traj.min_cold_ratio = min_cold / t_cold0;

    // uniform samples over the realized span; first row is the exact initial state
    traj.samples.push_back(p0);
    if (opts.n_samples > 1 && traj.t_final > 0.0) {
        std::vector<double> y(2 * n);
        for (int k = 1; k < opts.n_samples; ++k) {
            const double t = traj.t_final * k / (opts.n_samples - 1.0);
            pool.evaluate(t, y);
            states_from_y(fixed, y, states);
            traj.samples.push_back(make_point(sys, states, t));
        }
    }
    return traj;
}

ModeRelaxation mode_occupation_relaxation(const SystemSpec& sys,
                                          std::span<const ReservoirState> reservoirs,
                                          std::span<const double> n0, double duration,
                                          int n_samples) {
    sys.validate();
    if (reservoirs.empty())
        throw InvalidInputError("mode_occupation_relaxation: empty reservoir list");
    if (n0.size() != sys.modes.size())
        throw InvalidInputError(
            "mode_occupation_relaxation: one initial occupancy per mode required");
    for (const double v : n0)
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            throw InvalidInputError(
                "mode_occupation_relaxation: occupancies must lie in [0, 1]");
    if (n_samples < 2) throw InvalidInputError("mode_occupation_relaxation: n_samples >= 2");

    const std::size_t n_modes = sys.modes.size();
    ModeRelaxation out;
    out.rate.resize(n_modes);
    out.fixed_point.resize(n_modes);
    for (std::size_t k = 0; k < n_modes; ++k) {
        double rate = 0.0;
        for (const auto& r : reservoirs) rate += r.gamma(sys.modes[k]);
        out.rate[k] = rate;
        out.fixed_point[k] = weighted_occupancy(sys.modes[k], reservoirs);
    }
    if (duration <= 0.0)
        duration = 8.0 / *std::min_element(out.rate.begin(), out.rate.end());

    auto rhs = [&out](double /*t*/, std::span<const double> y, std::span<double> dydt) {
        for (std::size_t k = 0; k < y.size(); ++k)
            dydt[k] = out.rate[k] * (out.fixed_point[k] - y[k]);
    };
    Dopri5Options dopts;
    dopts.rtol = 1e-10;
    dopts.atol = 1e-14;
    Dopri5 stepper(rhs, 0.0, std::vector<double>(n0.begin(), n0.end()), dopts);

    out.times.reserve(n_samples);
    out.occupancy.reserve(n_samples);
    out.times.push_back(0.0);
    out.occupancy.emplace_back(n0.begin(), n0.end());
    int next = 1;
    std::vector<double> y(n_modes);
    while (next < n_samples && stepper.advance(duration)) {
        const DenseSegment& seg = stepper.segment();
        while (next < n_samples) {
            const double t = duration * next / (n_samples - 1.0);
            if (t > seg.t_end() && seg.t_end() < duration) break;
            seg.evaluate(std::min(t, seg.t_end()), y);
            out.times.push_back(t);
            out.occupancy.emplace_back(y.begin(), y.end());
            ++next;
        }
    }
    return out;
}

}  // namespace fermiflux
