#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace fracshoot {

enum class Method { AdamsPECE, FBDF2, FTrapezoidal };

std::string_view method_name(Method method) noexcept;
/// Accepts "adams", "bdf2" and "trapezoidal" (case-sensitive).
Method parse_method(std::string_view name);

/// Product-integration weights of the fractional Adams-Bashforth-Moulton
/// scheme on a unit-step mesh; multiply by h^alpha for step h.
///
/// For node m the scheme reads
///     predictor  y^P_m = y_0 + h^a sum_{j<m} predictor[m-j] f_j
///     corrector  y_m   = y_0 + h^a ( corrector[0] f(t_m, y) + sum_{0<j<m} corrector[m-j] f_j
///                                    + corrector_first[m] f_0 )
/// i.e. product rectangle and product trapezoid rules for the
/// Riemann-Liouville integral of order alpha.
struct AdamsWeights {
    double alpha = 0.0;
    std::vector<double> predictor;        // index = lag, [0] unused
    std::vector<double> corrector;        // index = lag, [0] is the implicit weight
    std::vector<double> corrector_first;  // index = node m, weight of f_0
};

/// Weights for nodes 1..n_steps. Requires 0 < alpha <= 1 and n_steps >= 1.
AdamsWeights adams_weights(double alpha, std::size_t n_steps);

/// Convolution quadrature weights of a fractional linear multistep method
/// (unit step), together with the starting weights that make the rule exact
/// on t^gamma for every gamma in `exponents`:
///
///     I^alpha g(t_n) ~ h^alpha ( sum_{j<=s} starting(n, j) g_j + sum_{k<=n} omega[n-k] g_k )
struct LubichWeights {
    double alpha = 0.0;
    Method method = Method::FBDF2;
    std::vector<double> omega;      // omega[0..n_steps]
    std::vector<double> exponents;  // exactness set, exponents[0] == 0
    std::vector<double> starting;   // row-major (n_steps + 1) x starting_count()
    double condition = 1.0;         // 1-norm condition estimate of the starting system
    bool ill_conditioned = false;   // condition above 1e12; results remain usable

    std::size_t starting_count() const noexcept { return exponents.size(); }
    double start(std::size_t n, std::size_t j) const noexcept { return starting[n * exponents.size() + j]; }
};

/// Taylor coefficients of delta(zeta)^(-alpha) for the generating function of
/// BDF2 or the trapezoidal rule, computed by their power-series recurrence.
std::vector<double> lubich_coefficients(double alpha, Method method, std::size_t count);

/// Exactness set {k alpha : k alpha <= 1} united with {1}.
std::vector<double> starting_exponents(double alpha);

/// Requires 0 < alpha <= 1, a multistep method, and n_steps >= 1.
LubichWeights flmm_weights(double alpha, Method method, std::size_t n_steps);

}  // namespace fracshoot
