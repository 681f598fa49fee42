#pragma once

// Reference implementations used only by the tests. They share no code with
// the library and trade speed for accuracy.

#include <functional>
#include <vector>

namespace oracle {

/// E_{p/q}(z) from the defining series in MPFR, with the working precision
/// raised to absorb the e^X cancellation (X = |z|^(q/p)). Use only where
/// series_feasible() holds.
double mittag_leffler_series(int p, int q, double z);

bool series_feasible(double alpha, double z);

/// E_alpha(z) for z < 0 and alpha < 1 from the spectral representation
///     E_alpha(-x) = int_0^inf exp(-r x^(1/alpha)) K_alpha(r) dr,
/// integrated by a double-exponential rule in long double.
double mittag_leffler_spectral(double alpha, double z);

/// Series where feasible, spectral integral otherwise (alpha = p/q).
double mittag_leffler(int p, int q, double z);

/// Coefficients of f_0..f_n in the product-rectangle (predictor) and
/// product-trapezoid (corrector) rules for the Riemann-Liouville integral
/// at t = n on a unit mesh, from closed-form antiderivatives evaluated in
/// 50-digit arithmetic.
struct AdamsRow {
    std::vector<double> predictor;  // size n (f_0..f_{n-1})
    std::vector<double> corrector;  // size n + 1
};
AdamsRow adams_row(double alpha, int n);

/// Power series of delta(z)^(-alpha) for BDF2 (bdf2 = true) or the
/// trapezoidal rule, by direct Cauchy products of binomial series.
std::vector<double> lubich_by_products(double alpha, bool bdf2, int count);

/// Caputo derivative at t of a function with derivative `y_prime`, by
/// tanh-sinh quadrature of t^(1-a)/Gamma(1-a) int_0^1 (1-u)^(-a) y'(t u) du.
double caputo_derivative(const std::function<double(double)>& y_prime, double alpha, double t);

}  // namespace oracle
