// fracshoot: solve, shoot and benchmark Caputo terminal value problems.

#include "fracshoot/bench.hpp"
#include "fracshoot/errors.hpp"
#include "fracshoot/mlf.hpp"
#include "fracshoot/problems.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fs = fracshoot;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitNumerical = 2;

struct CommonOptions {
    std::string problem = "ex1";
    std::optional<double> alpha;
    std::string out;
    std::string format = "csv";
    std::string cache_dir;
};

// Writes to --out when given, stdout otherwise.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) {
                throw fs::DomainError("cannot open output file " + path);
            }
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

std::filesystem::path cache_dir_of(const CommonOptions& o) {
    return o.cache_dir.empty() ? fs::default_cache_dir() : std::filesystem::path(o.cache_dir);
}

void add_common(CLI::App* cmd, CommonOptions& o, bool with_format) {
    cmd->add_option("--problem", o.problem, "Catalog problem")->check(CLI::IsMember(fs::catalog_ids()));
    cmd->add_option("--alpha", o.alpha, "Override the order of the problem");
    cmd->add_option("--out", o.out, "Output file (default: stdout)");
    cmd->add_option("--cache-dir", o.cache_dir, "Reference cache directory");
    if (with_format) {
        cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    }
}

double default_initial_value(const fs::CatalogProblem& p) {
    if (p.exact) {
        return p.exact(p.tvp.a);
    }
    return p.reference->y0;
}

int run_solve(const CommonOptions& o, const std::string& method, double step, std::optional<double> y0) {
    const auto problem = fs::catalog(o.problem, o.alpha);
    fs::SolverConfig cfg;
    cfg.method = fs::parse_method(method);
    const auto mesh = fs::Mesh::with_step(problem.tvp.a, problem.tvp.b, step);
    const auto traj = fs::solve_ivp(problem.tvp.with_initial(y0.value_or(default_initial_value(problem))), mesh, cfg);

    Output out(o.out);
    if (o.format == "json") {
        nlohmann::json j{{"t", nlohmann::json::array()}, {"y", traj.values}};
        for (std::size_t i = 0; i < traj.values.size(); ++i) {
            j["t"].push_back(traj.mesh.node(i));
        }
        out.stream() << j.dump() << '\n';
    } else {
        fs::write_trajectory_csv(out.stream(), traj);
    }
    return kExitOk;
}

struct ShootOptions {
    std::string method = "bdf2";
    double step = 0.0;
    double eps = 1e-6;
    std::string strategy = "unit";
    int max_shots = 100;
    std::string bundle;
};

int run_shoot(const CommonOptions& o, const ShootOptions& s) {
    const auto problem = fs::catalog(o.problem, o.alpha);
    const auto strategy = fs::parse_shooting_strategy(s.strategy);
    fs::ShootingConfig cfg;
    cfg.eps = s.eps;
    cfg.max_shots = s.max_shots;
    cfg.solver.method = fs::parse_method(s.method);
    cfg.mesh = fs::Mesh::with_step(problem.tvp.a, problem.tvp.b, s.step > 0.0 ? s.step : problem.steps.front());

    const fs::ShootingReport report = s.bundle.empty() ? fs::run_shooting(problem.tvp, cfg, strategy)
                                                       : fs::emit_figure_bundle(problem, strategy, cfg, s.bundle);
    const double err = fs::problem_error(problem, report.final_trajectory, cache_dir_of(o));
    const fs::SummaryRow row = fs::summarize(report, cfg, strategy, err);

    Output out(o.out);
    if (o.format == "json") {
        fs::write_report_json(out.stream(), report, row);
    } else {
        fs::write_summary_csv(out.stream(), {row});
    }
    if (!report.converged) {
        std::cerr << "fracshoot: " << report.message << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}

struct BenchOptions {
    std::vector<std::string> methods{"adams", "bdf2"};
    std::vector<double> steps;
    std::vector<double> eps{1e-6, 1e-8, 1e-10};
    std::vector<std::string> strategies{"bisection", "unit", "midpoint", "auto"};
    int repetitions = 3;
    int workers = 0;
    int max_shots = 100;
    bool include_setup = false;
};

int run_bench(const CommonOptions& o, const BenchOptions& b) {
    fs::ExperimentMatrix m;
    m.problem = o.problem;
    m.alpha = o.alpha;
    m.solvers.clear();
    for (const auto& name : b.methods) {
        m.solvers.push_back(fs::parse_method(name));
    }
    m.steps = b.steps;
    m.eps = b.eps;
    m.strategies.clear();
    for (const auto& name : b.strategies) {
        m.strategies.push_back(fs::parse_shooting_strategy(name));
    }
    m.repetitions = b.repetitions;
    m.workers = b.workers;
    m.include_setup_time = b.include_setup;
    m.max_shots = b.max_shots;
    m.cache_dir = cache_dir_of(o);

    const auto rows = fs::run_matrix(m);
    Output out(o.out);
    if (o.format == "json") {
        fs::write_summary_json(out.stream(), rows);
    } else if (o.format == "table") {
        fs::write_summary_table(out.stream(), rows);
    } else {
        fs::write_summary_csv(out.stream(), rows);
    }
    return kExitOk;
}

int run_mlf(double alpha, double z, double tol, const std::string& format) {
    const auto r = fs::mittag_leffler_detailed(fs::MlfRequest{alpha, z, tol});
    if (format == "json") {
        nlohmann::json j{{"alpha", alpha},
                         {"z", z},
                         {"value", r.value},
                         {"error_bound", r.error_bound},
                         {"regime", fs::regime_name(r.regime)}};
        std::cout << j.dump() << '\n';
    } else {
        std::cout << std::setprecision(17) << r.value << '\n'
                  << "# error_bound=" << std::setprecision(3) << r.error_bound
                  << " regime=" << fs::regime_name(r.regime) << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shooting methods for Caputo fractional terminal value problems"};
    app.require_subcommand(1);

    CommonOptions solve_common;
    std::string solve_method = "bdf2";
    double solve_step = 0.0;
    std::optional<double> solve_y0;
    auto* solve = app.add_subcommand("solve", "Solve one initial value problem and print the trajectory");
    add_common(solve, solve_common, true);
    solve->add_option("--method", solve_method, "IVP solver")->check(CLI::IsMember({"adams", "bdf2", "trapezoidal"}));
    solve->add_option("--step", solve_step, "Step size")->required()->check(CLI::PositiveNumber);
    solve->add_option("--y0", solve_y0, "Initial value (default: the problem's true y(a))");

    CommonOptions shoot_common;
    ShootOptions shoot_opts;
    auto* shoot = app.add_subcommand("shoot", "Solve one terminal value problem by shooting");
    add_common(shoot, shoot_common, true);
    shoot->add_option("--method", shoot_opts.method, "IVP solver")
        ->check(CLI::IsMember({"adams", "bdf2", "trapezoidal"}));
    shoot->add_option("--step", shoot_opts.step, "Step size (default: the first tabulated one)")
        ->check(CLI::PositiveNumber);
    shoot->add_option("--eps", shoot_opts.eps, "Terminal residual tolerance")->check(CLI::PositiveNumber);
    shoot->add_option("--strategy", shoot_opts.strategy, "Shooting strategy")
        ->check(CLI::IsMember({"bisection", "unit", "midpoint", "auto"}));
    shoot->add_option("--max-shots", shoot_opts.max_shots, "Cap on IVP solves")->check(CLI::PositiveNumber);
    shoot->add_option("--bundle", shoot_opts.bundle, "Directory for per-shot trajectories and a manifest");

    CommonOptions bench_common;
    BenchOptions bench_opts;
    auto* bench = app.add_subcommand("bench", "Run an experiment matrix and print one row per cell");
    bench->add_option("--problem", bench_common.problem, "Catalog problem")->check(CLI::IsMember(fs::catalog_ids()));
    bench->add_option("--alpha", bench_common.alpha, "Override the order of the problem");
    bench->add_option("--out", bench_common.out, "Output file (default: stdout)");
    bench->add_option("--cache-dir", bench_common.cache_dir, "Reference cache directory");
    bench->add_option("--format", bench_common.format, "Output format")
        ->check(CLI::IsMember({"csv", "json", "table"}));
    bench->add_option("--method", bench_opts.methods, "IVP solvers")
        ->check(CLI::IsMember({"adams", "bdf2", "trapezoidal"}));
    bench->add_option("--step", bench_opts.steps, "Step sizes (default: the tabulated ones)")
        ->check(CLI::PositiveNumber);
    bench->add_option("--eps", bench_opts.eps, "Terminal residual tolerances")->check(CLI::PositiveNumber);
    bench->add_option("--strategy", bench_opts.strategies, "Shooting strategies")
        ->check(CLI::IsMember({"bisection", "unit", "midpoint", "auto"}));
    bench->add_option("--repetitions", bench_opts.repetitions, "Timing runs per cell")->check(CLI::PositiveNumber);
    bench->add_option("--workers", bench_opts.workers, "Parallel cells (default: $FRACSHOOT_WORKERS or 1)");
    bench->add_option("--max-shots", bench_opts.max_shots, "Cap on IVP solves per run")->check(CLI::PositiveNumber);
    bench->add_flag("--include-setup", bench_opts.include_setup, "Time weight construction in every solve");

    double mlf_alpha = 0.5;
    double mlf_z = 0.0;
    double mlf_tol = fs::kMlfDefaultTol;
    std::string mlf_format = "csv";
    auto* mlf = app.add_subcommand("mlf", "Evaluate the Mittag-Leffler function E_alpha(z)");
    mlf->add_option("--alpha", mlf_alpha, "Order in (0, 1]")->required();
    mlf->add_option("--z", mlf_z, "Real argument")->required();
    mlf->add_option("--tol", mlf_tol, "Tolerance");
    mlf->add_option("--format", mlf_format, "Output format")->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        if (*solve) {
            return run_solve(solve_common, solve_method, solve_step, solve_y0);
        }
        if (*shoot) {
            return run_shoot(shoot_common, shoot_opts);
        }
        if (*bench) {
            return run_bench(bench_common, bench_opts);
        }
        return run_mlf(mlf_alpha, mlf_z, mlf_tol, mlf_format);
    } catch (const fs::DomainError& e) {
        std::cerr << "fracshoot: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const fs::NumericalError& e) {
        std::cerr << "fracshoot: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "fracshoot: " << e.what() << '\n';
        return kExitNumerical;
    }
}
