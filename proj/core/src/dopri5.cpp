#include "fermiflux/dopri5.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fermiflux/errors.hpp"

namespace fermiflux {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
// b5 - b4 (error weights)
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// dense-output coefficients
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo1 = 0.2 - kBeta * 0.75;
constexpr double kFacMin = 0.2;   // max shrink per step
constexpr double kFacMax = 10.0;  // max growth per step
constexpr double kEps = 2.220446049250313e-16;

}  // namespace

void DenseSegment::evaluate(double t, std::span<double> out) const {
    const double theta = (t - t0) / h;
    const double theta1 = 1.0 - theta;
    for (std::size_t i = 0; i < r1.size(); ++i)
        out[i] = r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
}

double DenseSegment::evaluate_component(double t, std::size_t i) const {
    const double theta = (t - t0) / h;
    const double theta1 = 1.0 - theta;
    return r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
}

Dopri5::Dopri5(OdeRhs rhs, double t0, std::vector<double> y0, const Dopri5Options& opts)
    : rhs_(std::move(rhs)), opts_(opts), t_(t0), y_(std::move(y0)) {
    const std::size_t n = y_.size();
    if (n == 0) throw InvalidInputError("dopri5: empty state vector");
    if (!(opts_.rtol > 0.0)) throw InvalidInputError("dopri5: rtol must be positive");
    for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &y_trial_, &y_stage_, &err_vec_})
        v->assign(n, 0.0);
    call_rhs(t_, y_, k1_);  // genuine errors at the initial point propagate
}

void Dopri5::call_rhs(double t, const std::vector<double>& y, std::vector<double>& dydt) {
    rhs_(t, y, dydt);
}

void Dopri5::throw_stiffness(double t, double h) const {
    std::ostringstream os;
    os << "dopri5: step size collapsed to " << h << " at t = " << t
       << " (problem too stiff for the explicit method); state:";
    for (std::size_t i = 0; i < y_.size() && i < 16; ++i) os << ' ' << y_[i];
    throw StiffnessError(os.str());
}

double Dopri5::initial_step_guess(double t_limit) {
    const std::size_t n = y_.size();
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sc = opts_.atol + opts_.rtol * std::abs(y_[i]);
        if (sc <= 0.0) continue;
        d0 += (y_[i] / sc) * (y_[i] / sc);
        d1 += (k1_[i] / sc) * (k1_[i] / sc);
    }
    d0 = std::sqrt(d0 / n);
    d1 = std::sqrt(d1 / n);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * (d0 / d1);
    h0 = std::min({h0, opts_.max_step, t_limit - t_});

    // one Euler trial to probe the curvature
    double d2 = 0.0;
    for (int attempt = 0; attempt < 12; ++attempt) {
        try {
            for (std::size_t i = 0; i < n; ++i) y_stage_[i] = y_[i] + h0 * k1_[i];
            call_rhs(t_ + h0, y_stage_, k2_);
            for (std::size_t i = 0; i < n; ++i) {
                const double sc = opts_.atol + opts_.rtol * std::abs(y_[i]);
                if (sc <= 0.0) continue;
                const double diff = (k2_[i] - k1_[i]) / sc;
                d2 += diff * diff;
            }
            d2 = std::sqrt(d2 / n) / h0;
            break;
        } catch (const StepOutsideDomain&) {
            h0 *= 0.1;
            d2 = 0.0;
        }
    }
    double h1;
    if (std::max(d1, d2) <= 1e-15)
        h1 = std::max(1e-6, h0 * 1e-3);
    else
        h1 = std::pow(0.01 / std::max(d1, d2), 0.2);
    return std::min({100.0 * h0, h1, opts_.max_step, t_limit - t_});
}

bool Dopri5::advance(double t_limit) {
    const std::size_t n = y_.size();
    if (t_ >= t_limit) return false;
    if (first_step_) {
        h_ = opts_.initial_step > 0.0 ? opts_.initial_step : initial_step_guess(t_limit);
        first_step_ = false;
    }
    bool previous_rejected = false;
    for (;;) {
        if (n_accepted_ + n_rejected_ >= opts_.max_steps) {
            std::ostringstream os;
            os << "dopri5: step budget of " << opts_.max_steps << " exhausted at t = " << t_;
            throw NumericError(os.str());
        }
        h_ = std::min(h_, opts_.max_step);
        bool last = false;
        if (t_ + h_ >= t_limit) {
            h_ = t_limit - t_;
            last = true;
        }
        if (h_ <= 10.0 * kEps * std::max(std::abs(t_), 1.0) && !last) throw_stiffness(t_, h_);

        bool domain_reject = false;
        try {
            for (std::size_t i = 0; i < n; ++i) y_stage_[i] = y_[i] + h_ * a21 * k1_[i];
            call_rhs(t_ + c2 * h_, y_stage_, k2_);
            for (std::size_t i = 0; i < n; ++i)
                y_stage_[i] = y_[i] + h_ * (a31 * k1_[i] + a32 * k2_[i]);
            call_rhs(t_ + c3 * h_, y_stage_, k3_);
            for (std::size_t i = 0; i < n; ++i)
                y_stage_[i] = y_[i] + h_ * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
            call_rhs(t_ + c4 * h_, y_stage_, k4_);
            for (std::size_t i = 0; i < n; ++i)
                y_stage_[i] =
                    y_[i] + h_ * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
            call_rhs(t_ + c5 * h_, y_stage_, k5_);
            for (std::size_t i = 0; i < n; ++i)
                y_stage_[i] = y_[i] + h_ * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] +
                                            a64 * k4_[i] + a65 * k5_[i]);
            call_rhs(t_ + h_, y_stage_, k6_);
            for (std::size_t i = 0; i < n; ++i)
                y_trial_[i] = y_[i] + h_ * (a71 * k1_[i] + a73 * k3_[i] + a74 * k4_[i] +
                                            a75 * k5_[i] + a76 * k6_[i]);
            call_rhs(t_ + h_, y_trial_, k7_);
        } catch (const StepOutsideDomain&) {
            domain_reject = true;
        }

        double err = 2.0;
        double sc_max = 0.0;
        if (!domain_reject) {
            double err_sq = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                err_vec_[i] = h_ * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] +
                                    e6 * k6_[i] + e7 * k7_[i]);
                const double sc =
                    opts_.atol + opts_.rtol * std::max(std::abs(y_[i]), std::abs(y_trial_[i]));
                sc_max = std::max(sc_max, sc);
                const double q = sc > 0.0 ? err_vec_[i] / sc : 0.0;
                err_sq += q * q;
            }
            err = std::sqrt(err_sq / n);
            if (!std::isfinite(err)) err = 2.0;
        }

        if (err <= 1.0) {
            // accept: dense coefficients, FSAL shift, PI update
            segment_.t0 = t_;
            segment_.h = h_;
            segment_.r1 = y_;
            segment_.r2.resize(n);
            segment_.r3.resize(n);
            segment_.r4.resize(n);
            segment_.r5.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double ydiff = y_trial_[i] - y_[i];
                const double bspl = h_ * k1_[i] - ydiff;
                segment_.r2[i] = ydiff;
                segment_.r3[i] = bspl;
                segment_.r4[i] = ydiff - h_ * k7_[i] - bspl;
                segment_.r5[i] = h_ * (d1 * k1_[i] + d3 * k3_[i] + d4 * k4_[i] + d5 * k5_[i] +
                                       d6 * k6_[i] + d7 * k7_[i]);
            }
            t_ += h_;
            y_.swap(y_trial_);
            k1_.swap(k7_);
            ++n_accepted_;
            last_error_ = err;
            accumulated_error_ += err * sc_max;

            const double fac11 = std::pow(std::max(err, 1e-10), kExpo1);
            double fac = fac11 / std::pow(fac_old_, kBeta);
            fac = std::max(1.0 / kFacMax, std::min(1.0 / kFacMin, fac / kSafety));
            double h_new = h_ / fac;
            if (previous_rejected) h_new = std::min(h_new, h_);
            fac_old_ = std::max(err, 1e-4);
            h_ = h_new;
            return true;
        }

        // rejected
        ++n_rejected_;
        previous_rejected = true;
        if (domain_reject) {
            h_ *= 0.5;
        } else {
            const double fac11 = std::pow(err, kExpo1);
            h_ /= std::min(1.0 / kFacMin, fac11 / kSafety);
        }
        if (h_ <= 10.0 * kEps * std::max(std::abs(t_), 1.0)) throw_stiffness(t_, h_);
    }
}

}  // namespace fermiflux
