#include "fracshoot/weights.hpp"

#include "fracshoot/errors.hpp"
#include "fracshoot/history.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>

namespace fracshoot {

namespace {

constexpr double kSeriesFrom = 8.0;
constexpr double kIllConditioned = 1e12;

void check_order(double alpha, const char* who) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        std::ostringstream os;
        os << who << ": order must lie in (0, 1], got " << alpha;
        throw DomainError(os.str());
    }
}

// d^a - (d-1)^a for d >= 1
double first_difference(double d, double a) {
    if (d <= 1.0) {
        return 1.0;
    }
    return -std::pow(d, a) * std::expm1(a * std::log1p(-1.0 / d));
}

// (d+1)^p - 2 d^p + (d-1)^p for d >= 1. For large d the three terms nearly
// cancel; expand around d instead:  2 d^p sum_{m>=1} C(p, 2m) d^(-2m).
double second_difference(double d, double p) {
    if (d < kSeriesFrom) {
        return std::pow(d + 1.0, p) - 2.0 * std::pow(d, p) + std::pow(d - 1.0, p);
    }
    const double inv2 = 1.0 / (d * d);
    double binom = 1.0;  // C(p, k)
    double power = 1.0;
    double sum = 0.0;
    for (int k = 1; k < 80; ++k) {
        binom *= (p - k + 1) / k;
        if (k % 2 == 1) {
            continue;
        }
        power *= inv2;
        const double term = binom * power;
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) {
            break;
        }
    }
    return 2.0 * std::pow(d, p) * sum;
}

// n^(a+1) - (n - a)(n+1)^a for n >= 0, i.e. n^(a+1) g(1/n) with
// g(x) = 1 - (1 - a x)(1 + x)^a = sum_{k>=2} c_k x^k.
double first_node_term(double n, double a) {
    if (n < kSeriesFrom) {
        return std::pow(n, a + 1.0) - (n - a) * std::pow(n + 1.0, a);
    }
    const double x = 1.0 / n;
    double binom_prev = a;  // C(a, 1)
    double binom = a * (a - 1.0) / 2.0;
    double power = x * x;
    double sum = 0.0;
    for (int k = 2; k < 80; ++k) {
        const double term = -(binom - a * binom_prev) * power;
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) {
            break;
        }
        binom_prev = binom;
        binom *= (a - k) / (k + 1);
        power *= x;
    }
    return std::pow(n, a + 1.0) * sum;
}

}  // namespace

std::string_view method_name(Method method) noexcept {
    switch (method) {
        case Method::AdamsPECE: return "adams";
        case Method::FBDF2: return "bdf2";
        case Method::FTrapezoidal: return "trapezoidal";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    if (name == "adams") return Method::AdamsPECE;
    if (name == "bdf2") return Method::FBDF2;
    if (name == "trapezoidal") return Method::FTrapezoidal;
    throw DomainError("unknown method '" + std::string(name) + "' (expected adams, bdf2 or trapezoidal)");
}

AdamsWeights adams_weights(double alpha, std::size_t n_steps) {
    check_order(alpha, "adams_weights");
    if (n_steps < 1) {
        throw DomainError("adams_weights: at least one step is required");
    }
    const double g1 = std::tgamma(alpha + 1.0);
    const double g2 = std::tgamma(alpha + 2.0);
    if (!std::isfinite(g1) || !std::isfinite(g2) || g1 <= 0.0) {
        throw DomainError("adams_weights: Gamma evaluation out of range");
    }

    AdamsWeights w;
    w.alpha = alpha;
    w.predictor.assign(n_steps + 1, 0.0);
    w.corrector.assign(n_steps + 1, 0.0);
    w.corrector_first.assign(n_steps + 1, 0.0);
    w.corrector[0] = 1.0 / g2;
    for (std::size_t d = 1; d <= n_steps; ++d) {
        const double dd = static_cast<double>(d);
        w.predictor[d] = first_difference(dd, alpha) / g1;
        w.corrector[d] = second_difference(dd, alpha + 1.0) / g2;
        w.corrector_first[d] = first_node_term(dd - 1.0, alpha) / g2;
    }
    return w;
}

std::vector<double> lubich_coefficients(double alpha, Method method, std::size_t count) {
    check_order(alpha, "lubich_coefficients");
    std::vector<double> g(count, 0.0);
    if (count == 0) {
        return g;
    }
    switch (method) {
        case Method::FBDF2: {
            // delta(z) = 3/2 - 2 z + z^2/2 raised to p = -alpha; Miller's recurrence
            // g_n = 1/(n phi_0) sum_{k=1..2} ((p+1) k - n) phi_k g_{n-k}.
            const double phi[3] = {1.5, -2.0, 0.5};
            const double p = -alpha;
            g[0] = std::pow(phi[0], p);
            for (std::size_t n = 1; n < count; ++n) {
                const double nn = static_cast<double>(n);
                double acc = ((p + 1.0) - nn) * phi[1] * g[n - 1];
                if (n >= 2) {
                    acc += (2.0 * (p + 1.0) - nn) * phi[2] * g[n - 2];
                }
                g[n] = acc / (nn * phi[0]);
            }
            break;
        }
        case Method::FTrapezoidal: {
            // delta(z) = 2 (1 - z)/(1 + z); ((1 + z)/(1 - z))^alpha solves
            // (1 - z^2) g' = 2 alpha g, whence (n+1) g_{n+1} = 2 alpha g_n + (n-1) g_{n-1}.
            const double scale = std::pow(2.0, -alpha);
            g[0] = 1.0;
            if (count > 1) {
                g[1] = 2.0 * alpha;
            }
            for (std::size_t n = 1; n + 1 < count; ++n) {
                const double nn = static_cast<double>(n);
                g[n + 1] = (2.0 * alpha * g[n] + (nn - 1.0) * g[n - 1]) / (nn + 1.0);
            }
            for (double& v : g) {
                v *= scale;
            }
            break;
        }
        case Method::AdamsPECE:
            throw DomainError("lubich_coefficients: Adams is not a linear multistep method");
    }
    return g;
}

std::vector<double> starting_exponents(double alpha) {
    check_order(alpha, "starting_exponents");
    std::vector<double> out;
    for (int k = 0;; ++k) {
        const double e = k * alpha;
        if (e > 1.0 + 1e-12) {
            break;
        }
        out.push_back(std::abs(e - 1.0) <= 1e-12 ? 1.0 : e);
    }
    if (out.back() != 1.0) {
        out.push_back(1.0);
    }
    return out;
}

LubichWeights flmm_weights(double alpha, Method method, std::size_t n_steps) {
    check_order(alpha, "flmm_weights");
    if (method == Method::AdamsPECE) {
        throw DomainError("flmm_weights: Adams is not a linear multistep method");
    }
    if (n_steps < 1) {
        throw DomainError("flmm_weights: at least one step is required");
    }

    LubichWeights w;
    w.alpha = alpha;
    w.method = method;
    w.omega = lubich_coefficients(alpha, method, n_steps + 1);
    w.exponents = starting_exponents(alpha);

    const std::size_t s1 = w.exponents.size();
    const std::size_t nodes = n_steps + 1;

    Eigen::MatrixXd vander(s1, s1);
    for (std::size_t i = 0; i < s1; ++i) {
        for (std::size_t j = 0; j < s1; ++j) {
            vander(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                (j == 0) ? (w.exponents[i] == 0.0 ? 1.0 : 0.0) : std::pow(static_cast<double>(j), w.exponents[i]);
        }
    }

    // Right-hand sides: exact fractional integral of t^gamma minus what the
    // convolution part already produces.
    Eigen::MatrixXd rhs(static_cast<Eigen::Index>(s1), static_cast<Eigen::Index>(nodes));
    std::vector<double> samples(nodes);
    for (std::size_t i = 0; i < s1; ++i) {
        const double gamma = w.exponents[i];
        for (std::size_t k = 0; k < nodes; ++k) {
            samples[k] = (k == 0) ? (gamma == 0.0 ? 1.0 : 0.0) : std::pow(static_cast<double>(k), gamma);
        }
        const std::vector<double> conv = history_sum(w.omega, samples);
        const double factor = std::tgamma(gamma + 1.0) / std::tgamma(gamma + 1.0 + alpha);
        for (std::size_t n = 0; n < nodes; ++n) {
            const double exact = (n == 0) ? 0.0 : factor * std::pow(static_cast<double>(n), gamma + alpha);
            rhs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n)) = exact - conv[n];
        }
    }

    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(vander);
    const Eigen::MatrixXd sol = lu.solve(rhs);
    w.condition = 1.0 / lu.rcond();
    w.ill_conditioned = !(w.condition < kIllConditioned);

    w.starting.assign(nodes * s1, 0.0);
    for (std::size_t n = 1; n < nodes; ++n) {
        for (std::size_t j = 0; j < s1; ++j) {
            w.starting[n * s1 + j] = sol(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(n));
        }
    }
    return w;
}

}  // namespace fracshoot
