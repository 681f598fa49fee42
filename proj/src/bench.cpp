#include "fracshoot/bench.hpp"

#include "fracshoot/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

namespace fracshoot {

namespace {

const char* const kSummaryHeader = "method,solver,h,eps,strategy,shots,max_error,wall_time_s,converged";
constexpr std::size_t kSummaryFields = 9;

std::string full_precision(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string quote_csv(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    if (quoted) {
        throw DomainError("summary csv: unterminated quote");
    }
    return fields;
}

double to_double(const std::string& s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw DomainError("summary csv: bad number '" + s + "'");
    }
    return v;
}

int to_int(const std::string& s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw DomainError("summary csv: bad integer '" + s + "'");
    }
    return v;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string two_digits(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1e", v);
    return buf;
}

std::string short_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2g", v);
    return buf;
}

struct Cell {
    Method solver;
    double h;
    double eps;
    ShootingStrategy strategy;
};

SummaryRow run_cell(const CatalogProblem& problem, const ExperimentMatrix& m, const Cell& cell,
                    const std::filesystem::path& cache_dir) {
    ShootingConfig cfg;
    cfg.eps = cell.eps;
    cfg.max_shots = m.max_shots;
    cfg.solver.method = cell.solver;
    cfg.solver.cache_weights = !m.include_setup_time;
    cfg.mesh = Mesh::with_step(problem.tvp.a, problem.tvp.b, cell.h);
    try {
        warm_weight_cache(problem.tvp.alpha, cfg.mesh, cfg.solver);
        std::vector<double> times;
        SummaryRow row;
        for (int rep = 0; rep < m.repetitions; ++rep) {
            const ShootingReport report = run_shooting(problem.tvp, cfg, cell.strategy);
            times.push_back(report.total_seconds);
            if (rep == 0) {
                row = summarize(report, cfg, cell.strategy, problem_error(problem, report.final_trajectory, cache_dir));
                if (!row.converged) {
                    row.shots = cfg.max_shots;
                }
            }
        }
        row.wall_time_s = median(times);
        return row;
    } catch (const Error&) {
        SummaryRow row;
        row.method = cell.strategy == ShootingStrategy::Bisection ? "bisection" : "secting";
        row.solver = std::string(method_name(cell.solver));
        row.h = cell.h;
        row.eps = cell.eps;
        row.strategy = std::string(shooting_strategy_name(cell.strategy));
        row.shots = cfg.max_shots;
        row.max_error = std::numeric_limits<double>::quiet_NaN();
        row.wall_time_s = std::numeric_limits<double>::quiet_NaN();
        row.converged = false;
        return row;
    }
}

}  // namespace

std::string_view shooting_strategy_name(ShootingStrategy s) noexcept {
    switch (s) {
        case ShootingStrategy::Bisection: return "bisection";
        case ShootingStrategy::Unit: return "unit";
        case ShootingStrategy::Midpoint: return "midpoint";
        case ShootingStrategy::Auto: return "auto";
    }
    return "unknown";
}

ShootingStrategy parse_shooting_strategy(std::string_view name) {
    if (name == "bisection") return ShootingStrategy::Bisection;
    if (name == "unit") return ShootingStrategy::Unit;
    if (name == "midpoint") return ShootingStrategy::Midpoint;
    if (name == "auto") return ShootingStrategy::Auto;
    throw DomainError("unknown strategy '" + std::string(name) + "' (expected bisection, unit, midpoint or auto)");
}

ShootingReport run_shooting(const FractionalTVP& tvp, ShootingConfig cfg, ShootingStrategy strategy) {
    switch (strategy) {
        case ShootingStrategy::Bisection:
            return shoot_bisection(tvp, cfg);
        case ShootingStrategy::Unit:
            cfg.c_strategy = CStrategy::Unit;
            break;
        case ShootingStrategy::Midpoint:
            cfg.c_strategy = CStrategy::Midpoint;
            break;
        case ShootingStrategy::Auto:
            cfg.c_strategy = CStrategy::Auto;
            break;
    }
    return shoot_proportional_secting(tvp, cfg);
}

void ExperimentMatrix::validate(const CatalogProblem& p) const {
    if (solvers.empty() || eps.empty() || strategies.empty()) {
        throw DomainError("experiment matrix: solver, eps and strategy lists must be nonempty");
    }
    if (repetitions < 1) {
        throw DomainError("experiment matrix: repetitions must be positive");
    }
    if (max_shots < 1) {
        throw DomainError("experiment matrix: max_shots must be positive");
    }
    for (double e : eps) {
        if (!(e > 0.0)) {
            throw DomainError("experiment matrix: eps values must be positive");
        }
    }
    for (double h : steps.empty() ? p.steps : steps) {
        Mesh::with_step(p.tvp.a, p.tvp.b, h);
    }
}

int default_worker_count() {
    if (const char* env = std::getenv("FRACSHOOT_WORKERS"); env != nullptr && *env != '\0') {
        const int n = std::atoi(env);
        if (n >= 1) {
            return n;
        }
    }
    return 1;
}

std::vector<SummaryRow> run_matrix(const ExperimentMatrix& m) {
    const CatalogProblem problem = catalog(m.problem, m.alpha);
    m.validate(problem);
    const std::vector<double>& steps = m.steps.empty() ? problem.steps : m.steps;
    const std::filesystem::path cache_dir = m.cache_dir.empty() ? default_cache_dir() : m.cache_dir;
    if (problem.reference) {
        reference_trajectory(problem, cache_dir);  // generate once, before any timing
    }

    std::vector<Cell> cells;
    for (Method solver : m.solvers) {
        for (double h : steps) {
            for (double e : m.eps) {
                for (ShootingStrategy s : m.strategies) {
                    cells.push_back({solver, h, e, s});
                }
            }
        }
    }

    std::vector<SummaryRow> rows(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            rows[i] = run_cell(problem, m, cells[i], cache_dir);
        }
    };
    const int workers = std::clamp(m.workers > 0 ? m.workers : default_worker_count(), 1,
                                   static_cast<int>(cells.size()));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int i = 0; i < workers; ++i) {
            pool.emplace_back(worker);
        }
    }
    return rows;
}

SummaryRow summarize(const ShootingReport& report, const ShootingConfig& cfg, ShootingStrategy strategy,
                     double max_error) {
    SummaryRow row;
    row.method = report.algorithm;
    row.solver = std::string(method_name(cfg.solver.method));
    row.h = cfg.mesh.step();
    row.eps = cfg.eps;
    row.strategy = std::string(shooting_strategy_name(strategy));
    row.shots = static_cast<int>(report.shot_count());
    row.max_error = max_error;
    row.wall_time_s = report.total_seconds;
    row.converged = report.converged;
    return row;
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
    os << kSummaryHeader << '\n';
    for (const auto& r : rows) {
        os << quote_csv(r.method) << ',' << quote_csv(r.solver) << ',' << full_precision(r.h) << ','
           << full_precision(r.eps) << ',' << quote_csv(r.strategy) << ',' << r.shots << ','
           << full_precision(r.max_error) << ',' << full_precision(r.wall_time_s) << ','
           << (r.converged ? "true" : "false") << '\n';
    }
}

std::vector<SummaryRow> read_summary_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) {
        throw DomainError("summary csv: missing header");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != kSummaryHeader) {
        throw DomainError("summary csv: unexpected header '" + line + "'");
    }
    std::vector<SummaryRow> rows;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != kSummaryFields) {
            throw DomainError("summary csv: expected 9 fields, got " + std::to_string(f.size()));
        }
        SummaryRow r;
        r.method = f[0];
        r.solver = f[1];
        r.h = to_double(f[2]);
        r.eps = to_double(f[3]);
        r.strategy = f[4];
        r.shots = to_int(f[5]);
        r.max_error = to_double(f[6]);
        r.wall_time_s = to_double(f[7]);
        if (f[8] != "true" && f[8] != "false") {
            throw DomainError("summary csv: converged must be true or false");
        }
        r.converged = f[8] == "true";
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_summary_json(std::ostream& os, const std::vector<SummaryRow>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows) {
        out.push_back({{"method", r.method},
                       {"solver", r.solver},
                       {"h", r.h},
                       {"eps", r.eps},
                       {"strategy", r.strategy},
                       {"shots", r.shots},
                       {"max_error", r.max_error},
                       {"wall_time_s", r.wall_time_s},
                       {"converged", r.converged}});
    }
    os << std::setprecision(17) << out.dump(2) << '\n';
}

void write_summary_table(std::ostream& os, const std::vector<SummaryRow>& rows) {
    char line[160];
    std::snprintf(line, sizeof line, "%-7s %-8s %-8s %-10s %6s %-9s %-8s\n", "solver", "h", "eps", "strategy",
                  "shots", "max_err", "time_s");
    os << line;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%-7s %-8s %-8s %-10s %6d %-9s %-8s%s\n", r.solver.c_str(),
                      short_number(r.h).c_str(), short_number(r.eps).c_str(), r.strategy.c_str(), r.shots,
                      two_digits(r.max_error).c_str(), short_number(r.wall_time_s).c_str(),
                      r.converged ? "" : "  (not converged)");
        os << line;
    }
}

void write_report_json(std::ostream& os, const ShootingReport& report, const SummaryRow& summary) {
    nlohmann::json shots = nlohmann::json::array();
    for (const auto& s : report.shots) {
        shots.push_back({{"k", s.k},
                         {"initial", s.initial},
                         {"terminal", s.terminal},
                         {"residual", s.residual},
                         {"seconds", s.seconds}});
    }
    nlohmann::json out{{"algorithm", report.algorithm},
                       {"converged", report.converged},
                       {"perturbed", report.perturbed},
                       {"message", report.message},
                       {"shots", shots},
                       {"initial_value", report.final_trajectory.values.empty()
                                             ? std::numeric_limits<double>::quiet_NaN()
                                             : report.final_estimate()},
                       {"estimate_seconds", report.estimate_seconds},
                       {"total_seconds", report.total_seconds},
                       {"summary",
                        {{"method", summary.method},
                         {"solver", summary.solver},
                         {"h", summary.h},
                         {"eps", summary.eps},
                         {"strategy", summary.strategy},
                         {"shots", summary.shots},
                         {"max_error", summary.max_error},
                         {"wall_time_s", summary.wall_time_s},
                         {"converged", summary.converged}}}};
    if (report.estimate) {
        const auto& e = *report.estimate;
        out["estimate"] = {{"l_low", e.l_low},   {"l_high", e.l_high}, {"c_low", e.c_low},
                           {"c_high", e.c_high}, {"c_hat", e.c_hat},   {"strategy", strategy_name(e.strategy)}};
    } else {
        out["estimate"] = nullptr;
    }
    os << out.dump(2) << '\n';
}

ShootingReport emit_figure_bundle(const CatalogProblem& problem, ShootingStrategy strategy, ShootingConfig cfg,
                                  const std::filesystem::path& out_dir) {
    cfg.keep_trajectories = true;
    ShootingReport report = run_shooting(problem.tvp, cfg, strategy);
    std::filesystem::create_directories(out_dir);

    std::ofstream manifest(out_dir / "manifest.csv");
    manifest << "k,initial,terminal,residual,file\n";
    for (std::size_t i = 0; i < report.shots.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "shot_%02zu.csv", i);
        std::ofstream traj(out_dir / name);
        write_trajectory_csv(traj, report.trajectories[i]);
        if (!traj) {
            throw DomainError("could not write " + (out_dir / name).string());
        }
        const auto& s = report.shots[i];
        manifest << s.k << ',' << full_precision(s.initial) << ',' << full_precision(s.terminal) << ','
                 << full_precision(s.residual) << ',' << name << '\n';
    }
    if (!manifest) {
        throw DomainError("could not write " + (out_dir / "manifest.csv").string());
    }
    return report;
}

}  // namespace fracshoot
