#include "fracshoot/mlf.hpp"

#include "fracshoot/errors.hpp"

#include <math.h>  // lgamma_r

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

namespace fracshoot {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = std::numbers::pi;

// Regime boundaries in terms of X = |z|^(1/alpha), the location of the
// largest series term.
constexpr double kSeriesPositiveMaxX = 50.0;   // beyond: exp(X)/alpha dominates to < e^-50
constexpr double kSeriesNegativeMaxX = 12.0;   // beyond: cancellation of e^X never pays off
constexpr double kAsymptoticNegativeMinX = 8.0;
constexpr int kAsymptoticMaxTerms = 400;
constexpr int kSeriesMaxTerms = 20000;

double lgamma_pos(double x) {
    int sign = 0;
    return ::lgamma_r(x, &sign);
}

// Sum with Neumaier compensation.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + carry; }
};

// z^k / Gamma(alpha k + 1) together with an estimate of its rounding error.
struct Term {
    double value;
    double error;
};

Term series_term(double alpha, double z, int k) {
    const double g_arg = alpha * k + 1.0;
    const double az = std::abs(z);
    const double sign = (z < 0.0 && (k % 2 == 1)) ? -1.0 : 1.0;
    if (g_arg < 170.0) {
        const double num = std::pow(az, k);
        if (std::isfinite(num)) {
            const double v = sign * num / std::tgamma(g_arg);
            return {v, 4.0 * kEps * std::abs(v)};
        }
    }
    const double log_num = k * std::log(az);
    const double log_den = lgamma_pos(g_arg);
    const double v = sign * std::exp(log_num - log_den);
    const double exponent_error = kEps * (std::abs(log_num) + std::abs(log_den) + 4.0);
    return {v, exponent_error * std::abs(v)};
}

MlfResult series(double alpha, double z) {
    const double x_peak = std::pow(std::abs(z), 1.0 / alpha);
    CompensatedSum sum;
    double abs_sum = 0.0;
    double err = 0.0;
    int k = 0;
    for (; k < kSeriesMaxTerms; ++k) {
        const Term t = series_term(alpha, z, k);
        sum.add(t.value);
        abs_sum += std::abs(t.value);
        err += t.error;
        if (alpha * k > x_peak + 1.0 && std::abs(t.value) <= 1e-3 * kEps * std::abs(sum.value())) {
            break;
        }
        if (t.value == 0.0 && k > 0) {
            break;
        }
    }
    const double tail = (k >= kSeriesMaxTerms) ? std::numeric_limits<double>::infinity() : 0.0;
    return {sum.value(), err + 2.0 * kEps * abs_sum + tail, MlfRegime::Series};
}

// E_alpha(z) ~ -sum_{k>=1} z^-k / Gamma(1 - alpha k), with the reflection
// 1/Gamma(1 - a) = Gamma(a) sin(pi a) / pi.
struct AsymptoticTail {
    double value;
    double error;
    bool converged;
};

AsymptoticTail algebraic_tail(double alpha, double z, double target) {
    const double ax = std::abs(z);
    const double log_ax = std::log(ax);
    CompensatedSum sum;
    double abs_sum = 0.0;
    double prev_mag = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= kAsymptoticMaxTerms; ++k) {
        const double a = alpha * k;
        const double mag = std::exp(lgamma_pos(a) - k * log_ax);
        if (mag <= target) {
            return {sum.value(), mag + 4.0 * kEps * abs_sum, true};
        }
        if (mag > prev_mag) {
            // Divergence has set in; the smallest term is the best available bound.
            return {sum.value(), prev_mag + 4.0 * kEps * abs_sum, false};
        }
        prev_mag = mag;
        const double zk_sign = (z < 0.0 && (k % 2 == 1)) ? -1.0 : 1.0;
        const double t = -zk_sign * mag * std::sin(kPi * a) / kPi;
        sum.add(t);
        abs_sum += std::abs(t);
    }
    return {sum.value(), prev_mag + 4.0 * kEps * abs_sum, false};
}

MlfResult asymptotic_negative(double alpha, double z, double budget) {
    const AsymptoticTail tail = algebraic_tail(alpha, z, 0.1 * budget);
    return {tail.value, tail.error, MlfRegime::Asymptotic};
}

MlfResult asymptotic_positive(double alpha, double z) {
    const double x_peak = std::pow(z, 1.0 / alpha);
    const double log_main = x_peak - std::log(alpha);
    if (log_main >= std::log(std::numeric_limits<double>::max())) {
        return {std::numeric_limits<double>::infinity(), 0.0, MlfRegime::Asymptotic};
    }
    const double main = std::exp(log_main);
    const AsymptoticTail tail = algebraic_tail(alpha, z, kEps * main);
    const double value = main + tail.value;
    // exp(log_main) inherits the absolute error of log_main as relative error.
    const double err = kEps * (std::abs(log_main) + 2.0) * main + tail.error;
    return {value, err, MlfRegime::Asymptotic};
}

// Trapezoidal rule on the parabola s(u) = mu (iu + 1)^2 for the Laplace
// transform s^(alpha-1) / (s^alpha - z) at t = 1. Valid for z < 0 with
// alpha < 1, where the transform has no poles on the principal sheet.
struct ContourSum {
    double value;
    double abs_sum;
};

ContourSum parabolic_contour(double alpha, double z, int n) {
    using cplx = std::complex<double>;
    const double step = 3.0 / n;
    const double mu = kPi * n / 12.0;
    auto transform = [&](cplx s) { return std::pow(s, alpha - 1.0) / (std::pow(s, alpha) - z); };

    const double centre = mu * std::exp(mu) * transform(cplx(mu, 0.0)).real();
    double acc = centre;
    double abs_acc = std::abs(centre);
    for (int k = 1; k <= n; ++k) {
        const double u = k * step;
        const cplx w(1.0, u);  // iu + 1
        const cplx s = mu * w * w;
        const cplx ds = cplx(0.0, 2.0 * mu) * w;
        const cplx g = std::exp(s) * transform(s) * ds;
        acc += g.imag();
        abs_acc += std::abs(g);
    }
    return {step / kPi * acc, step / kPi * abs_acc};
}

MlfResult contour(double alpha, double z, double budget) {
    // Discretisation error decays like exp(-2 pi n / 3); aim below budget/10.
    const double target = std::max(0.1 * budget, 1e-17);
    int n = static_cast<int>(std::ceil(-3.0 * std::log(target) / (2.0 * kPi)));
    n = std::clamp(n, 8, 40);
    const ContourSum coarse = parabolic_contour(alpha, z, n);
    const ContourSum fine = parabolic_contour(alpha, z, n + 6);
    const double err = std::abs(fine.value - coarse.value) + 8.0 * kEps * fine.abs_sum;
    return {fine.value, err, MlfRegime::Contour};
}

bool meets(const MlfResult& r, double tol) {
    return std::isfinite(r.value) ? r.error_bound <= tol * std::max(1.0, std::abs(r.value))
                                  : r.error_bound == 0.0;
}

}  // namespace

std::string_view regime_name(MlfRegime regime) noexcept {
    switch (regime) {
        case MlfRegime::Trivial: return "trivial";
        case MlfRegime::Exponential: return "exponential";
        case MlfRegime::Series: return "series";
        case MlfRegime::Asymptotic: return "asymptotic";
        case MlfRegime::Contour: return "contour";
    }
    return "unknown";
}

MlfResult mittag_leffler_detailed(const MlfRequest& req) {
    const double alpha = req.alpha;
    const double z = req.z;
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        std::ostringstream os;
        os << "mittag_leffler: order must lie in (0, 1], got " << alpha;
        throw DomainError(os.str());
    }
    if (!std::isfinite(z)) {
        throw DomainError("mittag_leffler: argument must be finite");
    }
    if (!(req.tol > 0.0) || !std::isfinite(req.tol)) {
        throw DomainError("mittag_leffler: tolerance must be positive");
    }

    if (z == 0.0) {
        return {1.0, 0.0, MlfRegime::Trivial};
    }
    if (alpha == 1.0) {
        const double v = std::exp(z);
        return {v, std::isfinite(v) ? kEps * v : 0.0, MlfRegime::Exponential};
    }

    // Each regime must meet tol with a factor 10 to spare.
    const double budget = 0.1 * req.tol;
    const double x_peak = std::pow(std::abs(z), 1.0 / alpha);

    MlfResult best{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity(),
                   MlfRegime::Series};
    auto consider = [&](const MlfResult& r) {
        if (std::isnan(best.value) || r.error_bound < best.error_bound) {
            best = r;
        }
        return meets(r, budget);
    };

    if (z > 0.0) {
        const MlfResult r = x_peak <= kSeriesPositiveMaxX ? series(alpha, z) : asymptotic_positive(alpha, z);
        if (consider(r)) {
            return r;
        }
    } else {
        if (x_peak <= kSeriesNegativeMaxX) {
            const MlfResult r = series(alpha, z);
            if (consider(r)) {
                return r;
            }
        }
        if (x_peak >= kAsymptoticNegativeMinX) {
            const MlfResult r = asymptotic_negative(alpha, z, budget);
            if (consider(r)) {
                return r;
            }
        }
        const MlfResult r = contour(alpha, z, budget);
        if (consider(r)) {
            return r;
        }
    }

    if (meets(best, req.tol)) {
        return best;
    }
    std::ostringstream os;
    os << "mittag_leffler: could not reach tol " << req.tol << " at alpha=" << alpha << ", z=" << z
       << " (best bound " << best.error_bound << ")";
    throw AccuracyError(os.str(), best.value, best.error_bound);
}

double mittag_leffler(const MlfRequest& req) {
    return mittag_leffler_detailed(req).value;
}

}  // namespace fracshoot
