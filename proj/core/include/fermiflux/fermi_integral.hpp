#pragma once

namespace fermiflux {

/// Quadrature evaluation of  integral_0^inf  e^a / (exp((e-mu)/T)+1) de
/// with a = f_exponent >= 0. Adaptive Gauss-Kronrod split at e = mu, tail
/// integrated to mu + 60 T; relative accuracy target 1e-10. Independent of
/// the Sommerfeld expansion by construction (test oracle).
double fermi_integral(double f_exponent, double mu, double temperature);

/// Analytic bound on the discarded tail beyond mu + 60 T (< e^-60 of scale).
double fermi_integral_tail_bound(double f_exponent, double mu, double temperature);

}  // namespace fermiflux
