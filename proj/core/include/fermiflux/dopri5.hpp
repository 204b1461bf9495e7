#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace fermiflux {

/// Thrown by a right-hand side when a trial state leaves the model domain;
/// the stepper rejects the step and retries with a smaller one.
struct StepOutsideDomain {};

using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

struct Dopri5Options {
    double rtol = 1e-9;
    double atol = 0.0;
    double initial_step = 0.0;  // 0 = automatic selection
    double max_step = std::numeric_limits<double>::infinity();
    long max_steps = 50'000'000;
};

/// Quartic dense-output polynomial over one accepted step.
struct DenseSegment {
    double t0 = 0.0;
    double h = 0.0;
    std::vector<double> r1, r2, r3, r4, r5;

    double t_begin() const { return t0; }
    double t_end() const { return t0 + h; }
    void evaluate(double t, std::span<double> out) const;
    double evaluate_component(double t, std::size_t i) const;
};

/// Dormand-Prince 5(4) with FSAL, PI step-size control and dense output.
class Dopri5 {
public:
    Dopri5(OdeRhs rhs, double t0, std::vector<double> y0, const Dopri5Options& opts = {});

    /// Take one accepted step, not crossing t_limit. Returns false when the
    /// integration already sits at t_limit. Throws StiffnessError when the
    /// step size collapses, NumericError when max_steps is exhausted.
    bool advance(double t_limit);

    double t() const { return t_; }
    std::span<const double> y() const { return y_; }
    std::span<const double> derivative() const { return k1_; }
    const DenseSegment& segment() const { return segment_; }

    double last_error() const { return last_error_; }
    /// Running sum of per-step absolute error estimates (coarse global bound).
    double accumulated_error() const { return accumulated_error_; }
    long accepted_steps() const { return n_accepted_; }
    long rejected_steps() const { return n_rejected_; }

private:
    void call_rhs(double t, const std::vector<double>& y, std::vector<double>& dydt);
    double initial_step_guess(double t_limit);
    [[noreturn]] void throw_stiffness(double t, double h) const;

    OdeRhs rhs_;
    Dopri5Options opts_;
    double t_;
    std::vector<double> y_;
    std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_;
    std::vector<double> y_trial_, y_stage_, err_vec_;
    DenseSegment segment_;
    double h_ = 0.0;
    double fac_old_ = 1e-4;
    double last_error_ = 0.0;
    double accumulated_error_ = 0.0;
    long n_accepted_ = 0;
    long n_rejected_ = 0;
    bool first_step_ = true;
};

}  // namespace fermiflux
