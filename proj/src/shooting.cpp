#include "fracshoot/shooting.hpp"

#include "fracshoot/errors.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace fracshoot {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Runs one IVP solve per call and keeps the report in step.
class ShotRunner {
public:
    ShotRunner(const FractionalTVP& tvp, const ShootingConfig& cfg, ShootingReport& report)
        : tvp_(tvp), cfg_(cfg), report_(report) {}

    const ShotRecord& shoot(double guess) {
        const auto start = Clock::now();
        Trajectory traj = solve_ivp(tvp_.with_initial(guess), cfg_.mesh, cfg_.solver);
        ShotRecord rec;
        rec.k = static_cast<int>(report_.shots.size());
        rec.initial = guess;
        rec.terminal = traj.terminal();
        rec.residual = tvp_.y_star - rec.terminal;
        rec.seconds = seconds_since(start);
        if (cfg_.keep_trajectories) {
            report_.trajectories.push_back(traj);
        }
        report_.final_trajectory = std::move(traj);
        report_.shots.push_back(rec);
        report_.converged = std::abs(rec.residual) <= cfg_.eps;
        return report_.shots.back();
    }

    bool exhausted() const { return static_cast<int>(report_.shots.size()) >= cfg_.max_shots; }

private:
    const FractionalTVP& tvp_;
    const ShootingConfig& cfg_;
    ShootingReport& report_;
};

void validate_tvp(const FractionalTVP& tvp) {
    if (!(tvp.alpha > 0.0 && tvp.alpha <= 1.0)) {
        throw DomainError("shooting: order must lie in (0, 1]");
    }
    if (!(tvp.a < tvp.b)) {
        throw DomainError("shooting: interval must satisfy a < b");
    }
    if (!tvp.rhs) {
        throw DomainError("shooting: right-hand side is empty");
    }
    if (!std::isfinite(tvp.y_star)) {
        throw DomainError("shooting: terminal value must be finite");
    }
}

std::string cap_message(int max_shots) {
    return "no convergence within " + std::to_string(max_shots) + " shots";
}

}  // namespace

void ShootingConfig::validate(const FractionalTVP& tvp) const {
    validate_tvp(tvp);
    if (!(eps > 0.0)) {
        throw DomainError("shooting: eps must be positive");
    }
    if (max_shots < 1) {
        throw DomainError("shooting: max_shots must be positive");
    }
    if (probe_count < 1) {
        throw DomainError("shooting: probe_count must be positive");
    }
    mesh.validate();
    solver.validate();
    const double tol = 1e-12 * std::max({1.0, std::abs(tvp.a), std::abs(tvp.b)});
    if (std::abs(mesh.a - tvp.a) > tol || std::abs(mesh.b - tvp.b) > tol) {
        throw DomainError("shooting: mesh must span the problem interval exactly");
    }
}

double first_guess(const FractionalTVP& tvp) noexcept {
    return tvp.y_star;
}

double second_guess(double y0_prev, double yb_prev, double y_star, double c_hat) {
    if (!(c_hat > 0.0) || !std::isfinite(c_hat)) {
        std::ostringstream os;
        os << "second_guess: proportionality factor must be positive and finite, got " << c_hat;
        throw StrategyError(os.str());
    }
    return y0_prev + (y_star - yb_prev) / c_hat;
}

double secant_guess(double y0_km1, double y0_km2, double yb_km1, double yb_km2, double y_star) {
    if (yb_km1 == yb_km2) {
        throw DegenerateSecantError("secant_guess: the two terminal values coincide");
    }
    return y0_km1 + (y_star - yb_km1) * (y0_km1 - y0_km2) / (yb_km1 - yb_km2);
}

ShootingReport shoot_proportional_secting(const FractionalTVP& tvp, const ShootingConfig& cfg) {
    cfg.validate(tvp);
    const auto start = Clock::now();
    ShootingReport report;
    report.algorithm = "secting";
    ShotRunner runner(tvp, cfg, report);

    runner.shoot(first_guess(tvp));
    if (!report.converged && !runner.exhausted()) {
        double c_hat = 1.0;
        if (cfg.c_strategy != CStrategy::Unit) {
            const auto est_start = Clock::now();
            const double H = cfg.probe_step > 0.0 ? cfg.probe_step : default_probe_step(report.final_trajectory);
            const LQuotientScan scan = scan_l_bounds(tvp.rhs, report.final_trajectory, H, cfg.probe_count);
            const ProportionalityBounds bounds = proportionality_bounds(tvp.alpha, tvp.a, tvp.b, scan);
            report.estimate =
                choose_c_hat(cfg.c_strategy, bounds.c_low, bounds.c_high, scan.l_low, scan.l_high);
            c_hat = report.estimate->c_hat;
            report.estimate_seconds = seconds_since(est_start);
        }
        const ShotRecord prev = report.shots.back();
        runner.shoot(second_guess(prev.initial, prev.terminal, tvp.y_star, c_hat));
    }

    while (!report.converged && !runner.exhausted()) {
        const ShotRecord newer = report.shots[report.shots.size() - 1];
        const ShotRecord older = report.shots[report.shots.size() - 2];
        double guess = 0.0;
        if (newer.terminal == older.terminal) {
            if (report.perturbed) {
                report.message = "secant step degenerate twice: equal terminal values";
                break;
            }
            report.perturbed = true;
            guess = newer.initial + std::max(cfg.eps, 1e-12 * (1.0 + std::abs(newer.initial)));
        } else {
            guess = secant_guess(newer.initial, older.initial, newer.terminal, older.terminal, tvp.y_star);
        }
        runner.shoot(guess);
    }

    if (!report.converged && report.message.empty()) {
        report.message = cap_message(cfg.max_shots);
    }
    report.total_seconds = seconds_since(start);
    return report;
}

ShootingReport shoot_bisection(const FractionalTVP& tvp, const ShootingConfig& cfg) {
    cfg.validate(tvp);
    const auto start = Clock::now();
    ShootingReport report;
    report.algorithm = "bisection";
    ShotRunner runner(tvp, cfg, report);

    auto finish = [&](std::string message) {
        if (!report.converged) {
            report.message = std::move(message);
        }
        report.total_seconds = seconds_since(start);
        return std::move(report);
    };

    const ShotRecord first = runner.shoot(first_guess(tvp));
    if (report.converged) {
        return finish({});
    }

    // The terminal value increases with the initial value, so a positive
    // residual asks for a larger initial value.
    const double direction = first.residual > 0.0 ? 1.0 : -1.0;
    double same_side = first.initial;  // residual has the sign of the first one
    double other_side = 0.0;
    bool bracketed = false;
    for (double step = 1.0; !runner.exhausted(); step *= 2.0) {
        const double guess = tvp.y_star + direction * step;
        const ShotRecord rec = runner.shoot(guess);
        if (report.converged) {
            return finish({});
        }
        if ((rec.residual > 0.0) != (first.residual > 0.0)) {
            other_side = guess;
            bracketed = true;
            break;
        }
        same_side = guess;
    }
    if (!bracketed) {
        return finish("no sign change found within " + std::to_string(cfg.max_shots) + " shots");
    }

    while (!runner.exhausted()) {
        const double mid = 0.5 * (same_side + other_side);
        const ShotRecord rec = runner.shoot(mid);
        if (report.converged) {
            break;
        }
        if ((rec.residual > 0.0) == (first.residual > 0.0)) {
            same_side = mid;
        } else {
            other_side = mid;
        }
    }
    return finish(cap_message(cfg.max_shots));
}

}  // namespace fracshoot
