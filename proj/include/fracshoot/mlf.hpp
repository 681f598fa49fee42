#pragma once

#include <string_view>

namespace fracshoot {

/// Default tolerance for Mittag-Leffler evaluations.
inline constexpr double kMlfDefaultTol = 1e-12;

/// One evaluation of E_alpha(z) for real z and 0 < alpha <= 1.
///
/// `tol` is a mixed absolute/relative bound: the evaluation succeeds when the
/// achieved error bound is at most tol * max(1, |E_alpha(z)|). For arguments
/// where E_alpha(z) exceeds 1 this is a relative bound, which is the only
/// meaningful one once the function grows like exp(z^(1/alpha)).
struct MlfRequest {
    double alpha = 0.5;
    double z = 0.0;
    double tol = kMlfDefaultTol;
};

enum class MlfRegime {
    Trivial,      // z == 0
    Exponential,  // alpha == 1
    Series,       // defining power series
    Asymptotic,   // large |z| expansion
    Contour,      // Laplace inversion on a parabolic contour
};

struct MlfResult {
    double value = 0.0;
    double error_bound = 0.0;  // absolute
    MlfRegime regime = MlfRegime::Trivial;
};

std::string_view regime_name(MlfRegime regime) noexcept;

/// Evaluates E_alpha(z) and reports the achieved error bound and the regime
/// that produced it.
///
/// Throws DomainError for alpha outside (0, 1], non-finite z or tol <= 0, and
/// AccuracyError (carrying the best estimate) if no regime meets tol.
/// Values beyond the double range come back as +infinity with a zero bound.
MlfResult mittag_leffler_detailed(const MlfRequest& req);

double mittag_leffler(const MlfRequest& req);

inline double mittag_leffler(double alpha, double z, double tol = kMlfDefaultTol) {
    return mittag_leffler(MlfRequest{alpha, z, tol});
}

}  // namespace fracshoot
