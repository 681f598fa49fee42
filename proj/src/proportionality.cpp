#include "fracshoot/proportionality.hpp"

#include "fracshoot/errors.hpp"
#include "fracshoot/mlf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fracshoot {

std::string_view strategy_name(CStrategy s) noexcept {
    switch (s) {
        case CStrategy::Unit: return "unit";
        case CStrategy::Midpoint: return "midpoint";
        case CStrategy::Auto: return "auto";
    }
    return "unknown";
}

CStrategy parse_strategy(std::string_view name) {
    if (name == "unit") return CStrategy::Unit;
    if (name == "midpoint") return CStrategy::Midpoint;
    if (name == "auto") return CStrategy::Auto;
    throw DomainError("unknown strategy '" + std::string(name) + "' (expected unit, midpoint or auto)");
}

double default_probe_step(const Trajectory& traj) {
    double peak = 0.0;
    for (double v : traj.values) {
        peak = std::max(peak, std::abs(v));
    }
    return 0.01 * (1.0 + peak);
}

LQuotientScan scan_l_bounds(const Rhs& rhs, const Trajectory& traj, double H, int M) {
    if (!(H > 0.0 && std::isfinite(H))) {
        throw DomainError("scan_l_bounds: probe step must be positive");
    }
    if (M < 1) {
        throw DomainError("scan_l_bounds: probe count must be at least 1");
    }
    if (traj.values.empty()) {
        throw DomainError("scan_l_bounds: empty trajectory");
    }
    if (!rhs) {
        throw DomainError("scan_l_bounds: right-hand side is empty");
    }

    LQuotientScan scan;
    scan.H = H;
    scan.M = M;
    scan.l_low = std::numeric_limits<double>::infinity();
    scan.l_high = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < traj.values.size(); ++j) {
        const double t = traj.mesh.node(j);
        const double y = traj.values[j];
        const double base = rhs(t, y);
        if (!std::isfinite(base)) {
            scan.skipped += 2 * static_cast<std::size_t>(M);
            continue;
        }
        for (int k = -M; k <= M; ++k) {
            if (k == 0) {
                continue;
            }
            const double offset = k * H;
            const double q = (rhs(t, y + offset) - base) / offset;
            if (!std::isfinite(q)) {
                ++scan.skipped;
                continue;
            }
            ++scan.probes;
            scan.l_low = std::min(scan.l_low, q);
            scan.l_high = std::max(scan.l_high, q);
        }
    }
    if (scan.probes == 0) {
        throw EstimationError("scan_l_bounds: every probe produced a non-finite value");
    }
    return scan;
}

LQuotientScan scan_l_bounds(const Rhs& rhs, const Trajectory& traj) {
    return scan_l_bounds(rhs, traj, default_probe_step(traj), kDefaultProbeCount);
}

ProportionalityBounds proportionality_bounds(double alpha, double a, double b, const LQuotientScan& scan) {
    if (!(b > a)) {
        throw DomainError("proportionality_bounds: need a < b");
    }
    if (!(scan.l_low <= scan.l_high)) {
        throw DomainError("proportionality_bounds: scan bounds out of order");
    }
    const double span = std::pow(b - a, alpha);
    ProportionalityBounds out;
    out.c_low = std::min(mittag_leffler(alpha, scan.l_low * span), kCHighCeiling);
    out.c_high = std::min(mittag_leffler(alpha, scan.l_high * span), kCHighCeiling);
    return out;
}

ProportionalityEstimate choose_c_hat(CStrategy strategy, double c_low, double c_high, double l_low,
                                     double l_high) {
    ProportionalityEstimate est{l_low, l_high, c_low, c_high, 1.0, strategy};
    const double midpoint = 0.5 * (c_low + c_high);
    switch (strategy) {
        case CStrategy::Unit:
            est.c_hat = 1.0;
            break;
        case CStrategy::Midpoint:
            est.c_hat = midpoint;
            break;
        case CStrategy::Auto:
            if (l_high <= 0.0) {
                est.c_hat = midpoint;
            } else if (l_low <= 0.0) {
                est.c_hat = 1.0;
            } else {
                est.c_hat = c_low;
            }
            break;
    }
    return est;
}

}  // namespace fracshoot
