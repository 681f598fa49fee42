#pragma once

#include "fracshoot/fode.hpp"
#include "fracshoot/proportionality.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fracshoot {

/// Caputo terminal value problem  D^alpha y = f(t, y), y(b) = y_star.
struct FractionalTVP {
    double alpha = 0.5;
    double a = 0.0;
    double b = 1.0;
    Rhs rhs;
    double y_star = 0.0;

    /// The IVP on the same interval started from y0.
    FractionalIVP with_initial(double y0) const { return FractionalIVP{alpha, a, b, rhs, y0}; }
};

struct ShootingConfig {
    double eps = 1e-6;  // stop once |y_star - y(b)| <= eps
    CStrategy c_strategy = CStrategy::Unit;
    int max_shots = 100;
    SolverConfig solver;
    Mesh mesh;
    bool keep_trajectories = false;  // keep every shot's trajectory in the report
    double probe_step = 0.0;         // <= 0 selects default_probe_step
    int probe_count = kDefaultProbeCount;

    void validate(const FractionalTVP& tvp) const;
};

struct ShotRecord {
    int k = 0;
    double initial = 0.0;
    double terminal = 0.0;
    double residual = 0.0;  // y_star - terminal
    double seconds = 0.0;   // wall time of this IVP solve
};

struct ShootingReport {
    std::string algorithm;  // "secting" or "bisection"
    std::vector<ShotRecord> shots;
    std::optional<ProportionalityEstimate> estimate;
    bool converged = false;
    bool perturbed = false;  // a degenerate secant step was perturbed
    std::string message;     // reason for non-convergence, empty otherwise
    Trajectory final_trajectory;
    std::vector<Trajectory> trajectories;  // filled when keep_trajectories is set
    double estimate_seconds = 0.0;
    double total_seconds = 0.0;

    std::size_t shot_count() const noexcept { return shots.size(); }
    double final_estimate() const { return final_trajectory.values.front(); }
};

/// The terminal value itself.
double first_guess(const FractionalTVP& tvp) noexcept;

/// y0_prev + (y_star - yb_prev) / c_hat. Throws StrategyError unless c_hat is
/// positive and finite.
double second_guess(double y0_prev, double yb_prev, double y_star, double c_hat);

/// Secant step through the two most recent shots. Throws
/// DegenerateSecantError when the two terminal values coincide.
double secant_guess(double y0_km1, double y0_km2, double yb_km1, double yb_km2, double y_star);

/// Shooting by proportional secting: first guess y_star, second guess from
/// c_hat, then secant steps on the two most recent shots.
ShootingReport shoot_proportional_secting(const FractionalTVP& tvp, const ShootingConfig& cfg);

/// Classical bisection. The bracket is found by stepping away from y_star
/// by 1, 2, 4, ... in the direction of the first residual; every solve,
/// bracketing included, counts as a shot.
ShootingReport shoot_bisection(const FractionalTVP& tvp, const ShootingConfig& cfg);

}  // namespace fracshoot
