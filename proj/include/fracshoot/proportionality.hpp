#pragma once

#include "fracshoot/fode.hpp"

#include <cstddef>
#include <string_view>

namespace fracshoot {

/// How the factor c_hat of the second shooting guess is chosen.
enum class CStrategy {
    Unit,      // c_hat = 1
    Midpoint,  // mean of the two Mittag-Leffler bounds
    Auto,      // picks by the sign pattern of the quotient bounds
};

std::string_view strategy_name(CStrategy s) noexcept;
/// Accepts "unit", "midpoint" and "auto".
CStrategy parse_strategy(std::string_view name);

inline constexpr int kDefaultProbeCount = 100;
/// Largest c_high handed on to arithmetic with residuals.
inline constexpr double kCHighCeiling = 1e300;

/// Extremes of the difference quotients of f in its second argument, sampled
/// along an approximate solution.
struct LQuotientScan {
    double H = 0.0;  // probe step
    int M = 0;       // probes per side
    double l_low = 0.0;
    double l_high = 0.0;
    std::size_t probes = 0;   // quotients evaluated
    std::size_t skipped = 0;  // probes dropped because f was not finite
};

/// 0.01 * (1 + max_j |y_j|).
double default_probe_step(const Trajectory& traj);

/// Min and max over all nodes t_j and k = +-1..+-M of
///     (f(t_j, y_j + k H) - f(t_j, y_j)) / (k H).
/// Throws DomainError for bad H or M and EstimationError if every probe had
/// to be skipped.
LQuotientScan scan_l_bounds(const Rhs& rhs, const Trajectory& traj, double H, int M);
LQuotientScan scan_l_bounds(const Rhs& rhs, const Trajectory& traj);

struct ProportionalityBounds {
    double c_low = 1.0;   // E_alpha(l_low (b-a)^alpha)
    double c_high = 1.0;  // E_alpha(l_high (b-a)^alpha), clamped to kCHighCeiling
};

ProportionalityBounds proportionality_bounds(double alpha, double a, double b, const LQuotientScan& scan);

struct ProportionalityEstimate {
    double l_low = 0.0;
    double l_high = 0.0;
    double c_low = 1.0;
    double c_high = 1.0;
    double c_hat = 1.0;
    CStrategy strategy = CStrategy::Unit;
};

ProportionalityEstimate choose_c_hat(CStrategy strategy, double c_low, double c_high, double l_low,
                                     double l_high);

}  // namespace fracshoot
