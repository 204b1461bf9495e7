#include "fermiflux/fermi_integral.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "fermiflux/errors.hpp"
#include "fermiflux/occupancy.hpp"

namespace fermiflux {

namespace {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1] (QUADPACK qk15 constants).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkResult {
    double integral;
    double error;
};

template <typename F>
GkResult gk15(const F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double result_gauss = kWg[3] * fc;
    double result_kronrod = kWgk[7] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kXgk[i];
        const double fsum = f(center - dx) + f(center + dx);
        result_kronrod += kWgk[i] * fsum;
        if (i % 2 == 1) result_gauss += kWg[i / 2] * fsum;
    }
    return {result_kronrod * half, std::abs(result_kronrod - result_gauss) * half};
}

template <typename F>
double adapt(const F& f, double a, double b, double tol, int depth, double& worst_interval_err) {
    const GkResult r = gk15(f, a, b);
    if (r.error <= tol || (b - a) < 1e-14 * (std::abs(a) + std::abs(b))) {
        worst_interval_err = std::max(worst_interval_err, r.error);
        return r.integral;
    }
    if (depth <= 0) {
        std::ostringstream os;
        os << "fermi_integral: quadrature did not converge on [" << a << ", " << b
           << "]: estimate " << r.integral << ", error " << r.error << ", tolerance " << tol;
        throw QuadratureError(os.str());
    }
    const double mid = 0.5 * (a + b);
    return adapt(f, a, mid, 0.5 * tol, depth - 1, worst_interval_err) +
           adapt(f, mid, b, 0.5 * tol, depth - 1, worst_interval_err);
}

}  // namespace

double fermi_integral(double f_exponent, double mu, double temperature) {
    if (!std::isfinite(f_exponent) || !std::isfinite(mu) || !std::isfinite(temperature))
        throw InvalidInputError("fermi_integral: non-finite input");
    if (f_exponent < 0.0)
        throw InvalidInputError("fermi_integral: exponent must be >= 0");
    if (temperature <= 0.0)
        throw InvalidInputError("fermi_integral: temperature must be positive");

    const auto integrand = [f_exponent, mu, temperature](double e) {
        return std::pow(e, f_exponent) * fermi_occupancy(e, mu, temperature);
    };
    const double upper = std::max(mu, 0.0) + 60.0 * temperature;

    // rough scale for the absolute tolerance
    const double scale = std::abs(gk15(integrand, 0.0, upper).integral) + 1e-300;
    const double tol = 1e-11 * scale;

    double worst = 0.0;
    double total = 0.0;
    if (mu > 0.0) {
        // the integrand bends hardest at the Fermi edge; split there
        total += adapt(integrand, 0.0, mu, 0.5 * tol, 55, worst);
        total += adapt(integrand, mu, upper, 0.5 * tol, 55, worst);
    } else {
        total = adapt(integrand, 0.0, upper, tol, 55, worst);
    }
    return total;
}

double fermi_integral_tail_bound(double f_exponent, double mu, double temperature) {
    // Beyond e0 = mu + 60T:  n(e) <= exp(-(e-mu)/T)  and
    // e^a <= e0^a exp(a (e-e0)/e0), so the tail is below
    // e0^a exp(-60) T / (1 - a T / e0).
    const double e0 = std::max(mu, 0.0) + 60.0 * temperature;
    const double geometric = 1.0 - f_exponent * temperature / e0;
    if (geometric <= 0.0) return std::numeric_limits<double>::infinity();
    return std::pow(e0, f_exponent) * std::exp(-60.0) * temperature / geometric;
}

}  // namespace fermiflux
