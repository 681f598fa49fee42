#include "fracshoot/fode.hpp"

#include "fracshoot/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <tuple>

namespace fracshoot {

namespace {

constexpr double kFdScale = 1e-7;

double eval_rhs(const Rhs& f, double t, double y) {
    const double v = f(t, y);
    if (!std::isfinite(v)) {
        std::ostringstream os;
        os.precision(17);
        os << "right-hand side returned " << v << " at t=" << t << ", y=" << y;
        throw RhsError(os.str(), t, y);
    }
    return v;
}

double fd_increment(double y) {
    return std::max(std::abs(y), 1.0) * kFdScale;
}

// Weight tables plus the convolution engine built on them; immutable once made.
struct Plan {
    AdamsWeights adams;
    LubichWeights lubich;
    std::unique_ptr<CausalConvolution> engine;
};

using PlanKey = std::tuple<std::uint64_t, int, std::size_t, std::size_t>;

std::shared_mutex g_cache_mutex;
std::map<PlanKey, std::shared_ptr<const Plan>> g_cache;

std::shared_ptr<const Plan> build_plan(double alpha, Method method, std::size_t n, std::size_t threshold) {
    auto plan = std::make_shared<Plan>();
    if (method == Method::AdamsPECE) {
        plan->adams = adams_weights(alpha, n);
        plan->engine = std::make_unique<CausalConvolution>(
            std::vector<std::vector<double>>{plan->adams.predictor, plan->adams.corrector}, n + 1, threshold);
    } else {
        plan->lubich = flmm_weights(alpha, method, n);
        plan->engine = std::make_unique<CausalConvolution>(std::vector<std::vector<double>>{plan->lubich.omega},
                                                           n + 1, threshold);
    }
    return plan;
}

std::shared_ptr<const Plan> get_plan(double alpha, Method method, std::size_t n, const SolverConfig& cfg) {
    if (!cfg.cache_weights) {
        return build_plan(alpha, method, n, cfg.fft_threshold);
    }
    const PlanKey key{std::bit_cast<std::uint64_t>(alpha), static_cast<int>(method), n, cfg.fft_threshold};
    {
        std::shared_lock lock(g_cache_mutex);
        if (auto it = g_cache.find(key); it != g_cache.end()) {
            return it->second;
        }
    }
    // Built outside the lock; a concurrent duplicate build is harmless.
    auto plan = build_plan(alpha, method, n, cfg.fft_threshold);
    std::unique_lock lock(g_cache_mutex);
    return g_cache.try_emplace(key, std::move(plan)).first->second;
}

void validate_ivp(const FractionalIVP& ivp) {
    if (!(ivp.alpha > 0.0 && ivp.alpha <= 1.0)) {
        throw DomainError("solve_ivp: order must lie in (0, 1]");
    }
    if (!(std::isfinite(ivp.a) && std::isfinite(ivp.b) && ivp.a < ivp.b)) {
        throw DomainError("solve_ivp: interval must satisfy a < b");
    }
    if (!ivp.rhs) {
        throw DomainError("solve_ivp: right-hand side is empty");
    }
    if (!std::isfinite(ivp.y0)) {
        throw DomainError("solve_ivp: initial value must be finite");
    }
}

bool same_point(double x, double y) {
    return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)});
}

Trajectory solve_adams(const FractionalIVP& ivp, const Mesh& mesh, const SolverConfig& cfg, const Plan& plan) {
    const std::size_t n = mesh.n;
    const double scale = std::pow(mesh.step(), ivp.alpha);
    const auto& w = plan.adams;

    Trajectory out{mesh, std::vector<double>(n + 1, ivp.y0)};
    std::vector<double> f(n + 1, 0.0);
    f[0] = eval_rhs(ivp.rhs, mesh.a, ivp.y0);
    const double f0 = f[0];
    const double y0 = ivp.y0;

    plan.engine->run(f, 1, [&](std::size_t m, std::span<const double> hist) {
        const double t = mesh.node(m);
        double y = y0 + scale * hist[0];
        const double explicit_part = hist[1] + (w.corrector_first[m] - w.corrector[m]) * f0;
        for (int it = 0; it < cfg.corrector_iters; ++it) {
            const double fy = eval_rhs(ivp.rhs, t, y);
            y = y0 + scale * (w.corrector[0] * fy + explicit_part);
        }
        out.values[m] = y;
        return eval_rhs(ivp.rhs, t, y);
    });
    return out;
}

// Nodes 1..S share the starting weights on f_0..f_S, so they are solved as one
// small nonlinear system.
void solve_start_block(const FractionalIVP& ivp, const Mesh& mesh, const SolverConfig& cfg, const LubichWeights& w,
                       double scale, std::vector<double>& y, std::vector<double>& f) {
    const std::size_t s = w.starting_count() - 1;
    if (s == 0) {
        return;
    }
    const auto idx = [](std::size_t i) { return static_cast<Eigen::Index>(i); };

    // Also records the rounding floor of each residual entry; large starting
    // weights for small orders put it far above newton_tol.
    double noise_floor = 0.0;
    auto residual = [&](const std::vector<double>& fy, Eigen::VectorXd& r) {
        noise_floor = 0.0;
        for (std::size_t n = 1; n <= s; ++n) {
            double acc = 0.0;
            double mag = 0.0;
            for (std::size_t j = 0; j <= s; ++j) {
                acc += w.start(n, j) * fy[j];
                mag += std::abs(w.start(n, j) * fy[j]);
            }
            for (std::size_t k = 0; k <= n; ++k) {
                acc += w.omega[n - k] * fy[k];
                mag += std::abs(w.omega[n - k] * fy[k]);
            }
            r(idx(n - 1)) = y[n] - ivp.y0 - scale * acc;
            const double noise = 8.0 * static_cast<double>(s + n + 2) * std::numeric_limits<double>::epsilon() *
                                 (std::abs(y[n]) + std::abs(ivp.y0) + std::abs(scale) * mag);
            noise_floor = std::max(noise_floor, noise);
        }
    };

    Eigen::VectorXd r(idx(s));
    Eigen::MatrixXd jac(idx(s), idx(s));
    for (int it = 0; it < cfg.newton_max_iters; ++it) {
        for (std::size_t j = 1; j <= s; ++j) {
            f[j] = eval_rhs(ivp.rhs, mesh.node(j), y[j]);
        }
        residual(f, r);
        if (r.cwiseAbs().maxCoeff() <= noise_floor) {
            return;
        }
        // Jacobian from the weights and a scalar difference of the rhs, so
        // rounding in the weighted sums does not enter it.
        Eigen::VectorXd slope(idx(s));
        for (std::size_t i = 1; i <= s; ++i) {
            const double delta = fd_increment(y[i]);
            slope(idx(i - 1)) = (eval_rhs(ivp.rhs, mesh.node(i), y[i] + delta) - f[i]) / delta;
        }
        for (std::size_t n = 1; n <= s; ++n) {
            for (std::size_t i = 1; i <= s; ++i) {
                const double weight = w.start(n, i) + (i <= n ? w.omega[n - i] : 0.0);
                jac(idx(n - 1), idx(i - 1)) = (n == i ? 1.0 : 0.0) - scale * weight * slope(idx(i - 1));
            }
        }
        const Eigen::VectorXd step = jac.partialPivLu().solve(-r);
        if (!step.allFinite()) {
            throw SolverError("solve_ivp: singular Newton system in the starting block", 1);
        }
        for (std::size_t i = 1; i <= s; ++i) {
            y[i] += step(idx(i - 1));
        }
        if (step.cwiseAbs().maxCoeff() < cfg.newton_tol) {
            for (std::size_t j = 1; j <= s; ++j) {
                f[j] = eval_rhs(ivp.rhs, mesh.node(j), y[j]);
            }
            return;
        }
    }
    throw SolverError("solve_ivp: Newton iteration did not converge in the starting block", 1);
}

Trajectory solve_lubich(const FractionalIVP& ivp, const Mesh& mesh, const SolverConfig& cfg, const Plan& plan) {
    const std::size_t n = mesh.n;
    const auto& w = plan.lubich;
    const std::size_t s = w.starting_count() - 1;
    if (n < s) {
        std::ostringstream os;
        os << "solve_ivp: " << method_name(cfg.method) << " at order " << ivp.alpha << " needs at least " << s
           << " steps, got " << n;
        throw DomainError(os.str());
    }
    const double scale = std::pow(mesh.step(), ivp.alpha);
    const double implicit = scale * w.omega[0];

    Trajectory out{mesh, std::vector<double>(n + 1, ivp.y0)};
    std::vector<double> f(n + 1, 0.0);
    f[0] = eval_rhs(ivp.rhs, mesh.a, ivp.y0);
    solve_start_block(ivp, mesh, cfg, w, scale, out.values, f);

    plan.engine->run(f, s + 1, [&](std::size_t m, std::span<const double> hist) {
        const double t = mesh.node(m);
        double start = 0.0;
        for (std::size_t j = 0; j <= s; ++j) {
            start += w.start(m, j) * f[j];
        }
        const double known = ivp.y0 + scale * (start + hist[0]);
        double y = out.values[m - 1];
        for (int it = 0; it < cfg.newton_max_iters; ++it) {
            const double fy = eval_rhs(ivp.rhs, t, y);
            const double delta = fd_increment(y);
            const double slope = (eval_rhs(ivp.rhs, t, y + delta) - fy) / delta;
            const double g = y - known - implicit * fy;
            const double dg = 1.0 - implicit * slope;
            const double step = -g / dg;
            if (!std::isfinite(step)) {
                throw SolverError("solve_ivp: singular Newton step at node " + std::to_string(m), m);
            }
            y += step;
            if (std::abs(step) < cfg.newton_tol) {
                out.values[m] = y;
                return eval_rhs(ivp.rhs, t, y);
            }
        }
        throw SolverError("solve_ivp: Newton iteration did not converge at node " + std::to_string(m), m);
    });
    return out;
}

double parse_double(const std::string& text, std::size_t line) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw DomainError("trajectory csv: bad number '" + text + "' on line " + std::to_string(line));
    }
    return v;
}

}  // namespace

Mesh Mesh::with_step(double a, double b, double h) {
    if (!(std::isfinite(a) && std::isfinite(b) && a < b)) {
        throw DomainError("mesh: interval must satisfy a < b");
    }
    if (!(h > 0.0 && std::isfinite(h))) {
        throw DomainError("mesh: step must be positive");
    }
    const double ratio = (b - a) / h;
    const double count = std::round(ratio);
    if (count < 1.0 || std::abs(ratio - count) > 1e-9 * std::max(1.0, ratio)) {
        std::ostringstream os;
        os << "mesh: step " << h << " does not divide [" << a << ", " << b << "] into whole steps";
        throw DomainError(os.str());
    }
    return Mesh{a, b, static_cast<std::size_t>(count)};
}

void Mesh::validate() const {
    if (!(std::isfinite(a) && std::isfinite(b) && a < b) || n < 1) {
        throw DomainError("mesh: need a < b and at least one step");
    }
}

void SolverConfig::validate() const {
    if (corrector_iters < 1) {
        throw DomainError("solver config: corrector_iters must be positive");
    }
    if (!(newton_tol > 0.0)) {
        throw DomainError("solver config: newton_tol must be positive");
    }
    if (newton_max_iters < 1) {
        throw DomainError("solver config: newton_max_iters must be positive");
    }
}

Trajectory solve_ivp(const FractionalIVP& ivp, const Mesh& mesh, const SolverConfig& cfg) {
    validate_ivp(ivp);
    mesh.validate();
    cfg.validate();
    if (!same_point(mesh.a, ivp.a) || !same_point(mesh.b, ivp.b)) {
        throw DomainError("solve_ivp: mesh interval differs from the problem interval");
    }
    const auto plan = get_plan(ivp.alpha, cfg.method, mesh.n, cfg);
    if (cfg.method == Method::AdamsPECE) {
        return solve_adams(ivp, mesh, cfg, *plan);
    }
    return solve_lubich(ivp, mesh, cfg, *plan);
}

Trajectory extend_solution(const Trajectory& tvp_solution, const FractionalIVP& ivp, double c,
                           const SolverConfig& cfg) {
    if (tvp_solution.values.empty()) {
        throw DomainError("extend_solution: empty trajectory");
    }
    if (!(c >= ivp.b)) {
        throw DomainError("extend_solution: extension endpoint must not precede b");
    }
    FractionalIVP extended = ivp;
    extended.y0 = tvp_solution.values.front();
    if (c == ivp.b) {
        return solve_ivp(extended, tvp_solution.mesh, cfg);
    }
    extended.b = c;
    return solve_ivp(extended, Mesh::with_step(ivp.a, c, tvp_solution.mesh.step()), cfg);
}

void warm_weight_cache(double alpha, const Mesh& mesh, const SolverConfig& cfg) {
    if (cfg.cache_weights) {
        mesh.validate();
        get_plan(alpha, cfg.method, mesh.n, cfg);
    }
}

void clear_weight_cache() {
    std::unique_lock lock(g_cache_mutex);
    g_cache.clear();
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    const auto old_precision = os.precision(17);
    os << "t,y\n";
    for (std::size_t j = 0; j < traj.values.size(); ++j) {
        os << traj.mesh.node(j) << ',' << traj.values[j] << '\n';
    }
    os.precision(old_precision);
}

Trajectory read_trajectory_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || (line != "t,y" && line != "t,y\r")) {
        throw DomainError("trajectory csv: expected header 't,y'");
    }
    std::vector<double> ts;
    std::vector<double> ys;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw DomainError("trajectory csv: missing comma on line " + std::to_string(line_no));
        }
        ts.push_back(parse_double(line.substr(0, comma), line_no));
        ys.push_back(parse_double(line.substr(comma + 1), line_no));
    }
    if (ys.size() < 2) {
        throw DomainError("trajectory csv: need at least two rows");
    }
    Trajectory traj{Mesh{ts.front(), ts.back(), ys.size() - 1}, std::move(ys)};
    traj.mesh.validate();
    return traj;
}

}  // namespace fracshoot
