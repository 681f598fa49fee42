#include "fracshoot/problems.hpp"

#include "fracshoot/errors.hpp"
#include "fracshoot/mlf.hpp"

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

namespace fracshoot {

namespace {

constexpr double kEx3TerminalValue = 0.8360565;
constexpr double kEx3Order = 0.7;

CatalogProblem make_ex1(double alpha) {
    const double c8 = 40320.0 / std::tgamma(9.0 - alpha);
    const double c4 = 3.0 * std::tgamma(5.0 + alpha / 2.0) / std::tgamma(5.0 - alpha / 2.0);
    const double c0 = 2.25 * std::tgamma(1.0 + alpha);
    CatalogProblem p;
    p.id = "ex1";
    p.tvp.alpha = alpha;
    p.tvp.a = 0.0;
    p.tvp.b = 1.0;
    p.tvp.rhs = [=](double t, double y) {
        const double inner = 1.5 * std::pow(t, alpha / 2.0) - std::pow(t, 4.0);
        return c8 * std::pow(t, 8.0 - alpha) - c4 * std::pow(t, 4.0 - alpha / 2.0) + c0 + inner * inner * inner -
               std::pow(std::abs(y), 1.5);
    };
    p.tvp.y_star = 0.25;
    p.exact = [=](double t) {
        return std::pow(t, 8.0) - 3.0 * std::pow(t, 4.0 + alpha / 2.0) + 2.25 * std::pow(t, alpha);
    };
    p.steps = {0.002, 0.001, 0.0005};
    return p;
}

CatalogProblem make_ex2(double alpha) {
    CatalogProblem p;
    p.id = "ex2";
    p.tvp.alpha = alpha;
    p.tvp.a = 0.0;
    p.tvp.b = 7.0;
    p.tvp.rhs = [](double, double y) { return -1.5 * y; };
    p.tvp.y_star = 2.8 * mittag_leffler(alpha, -1.5 * std::pow(7.0, alpha));
    p.exact = [=](double t) { return 2.8 * mittag_leffler(alpha, -1.5 * std::pow(t, alpha)); };
    p.steps = {0.014, 0.007, 0.0035};
    return p;
}

CatalogProblem make_ex3() {
    CatalogProblem p;
    p.id = "ex3";
    p.tvp.alpha = kEx3Order;
    p.tvp.a = 0.0;
    p.tvp.b = 20.0;
    p.tvp.rhs = [](double t, double y) { return std::sin(t * y) / (t + 1.0); };
    p.tvp.y_star = kEx3TerminalValue;
    p.reference = ReferenceRecipe{Method::FBDF2, 2'000'000, 100, 1.0};
    p.steps = {0.04, 0.02, 0.01};
    return p;
}

std::mutex g_reference_mutex;
std::map<std::string, std::shared_ptr<const Trajectory>> g_references;
std::atomic<unsigned> g_tmp_counter{0};

Trajectory generate_reference(const CatalogProblem& problem) {
    const ReferenceRecipe& r = *problem.reference;
    SolverConfig cfg;
    cfg.method = r.method;
    cfg.cache_weights = false;
    const Mesh fine{problem.tvp.a, problem.tvp.b, r.steps};
    const Trajectory full = solve_ivp(problem.tvp.with_initial(r.y0), fine, cfg);

    Trajectory kept{Mesh{problem.tvp.a, problem.tvp.b, r.steps / r.stride}, {}};
    kept.values.reserve(kept.mesh.n + 1);
    for (std::size_t j = 0; j <= r.steps; j += r.stride) {
        kept.values.push_back(full.values[j]);
    }
    return kept;
}

}  // namespace

std::vector<std::string> catalog_ids() {
    return {"ex1", "ex2", "ex3"};
}

CatalogProblem catalog(std::string_view id, std::optional<double> alpha_override) {
    if (alpha_override && !(*alpha_override > 0.0 && *alpha_override < 1.0)) {
        throw DomainError("catalog: order must lie in (0, 1)");
    }
    if (id == "ex1") {
        return make_ex1(alpha_override.value_or(0.3));
    }
    if (id == "ex2") {
        return make_ex2(alpha_override.value_or(0.3));
    }
    if (id == "ex3") {
        if (alpha_override && *alpha_override != kEx3Order) {
            throw DomainError("catalog: ex3 has a known terminal value only for alpha = 0.7");
        }
        return make_ex3();
    }
    throw DomainError("catalog: unknown problem '" + std::string(id) + "' (expected ex1, ex2 or ex3)");
}

double max_error(const Trajectory& traj, const std::function<double(double)>& exact) {
    double worst = 0.0;
    for (std::size_t j = 0; j < traj.values.size(); ++j) {
        worst = std::max(worst, std::abs(traj.values[j] - exact(traj.mesh.node(j))));
    }
    return worst;
}

double max_error(const Trajectory& traj, const Trajectory& reference) {
    const auto& m = traj.mesh;
    const auto& r = reference.mesh;
    const double tol = 1e-12 * std::max({1.0, std::abs(m.a), std::abs(m.b)});
    if (std::abs(m.a - r.a) > tol || std::abs(m.b - r.b) > tol) {
        throw MetricError("max_error: trajectory and reference cover different intervals");
    }
    if (m.n == 0 || r.n % m.n != 0) {
        std::ostringstream os;
        os << "max_error: " << m.n << " steps are not commensurate with the reference's " << r.n;
        throw MetricError(os.str());
    }
    const std::size_t ratio = r.n / m.n;
    double worst = 0.0;
    for (std::size_t j = 0; j < traj.values.size(); ++j) {
        worst = std::max(worst, std::abs(traj.values[j] - reference.values[j * ratio]));
    }
    return worst;
}

std::string reference_file_name(const CatalogProblem& problem) {
    if (!problem.reference) {
        throw DomainError("reference_file_name: problem '" + problem.id + "' has no reference recipe");
    }
    const ReferenceRecipe& r = *problem.reference;
    std::ostringstream os;
    os << problem.id << "_a" << problem.tvp.alpha << '_' << method_name(r.method) << "_N" << r.steps << "_s"
       << r.stride << ".csv";
    return os.str();
}

std::filesystem::path default_cache_dir() {
    if (const char* env = std::getenv("FRACSHOOT_CACHE_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return ".fracshoot-cache";
}

std::shared_ptr<const Trajectory> reference_trajectory(const CatalogProblem& problem,
                                                       const std::filesystem::path& cache_dir) {
    const std::filesystem::path path = cache_dir / reference_file_name(problem);
    const std::string key = path.lexically_normal().string();

    std::lock_guard lock(g_reference_mutex);
    if (auto it = g_references.find(key); it != g_references.end()) {
        return it->second;
    }

    const ReferenceRecipe& r = *problem.reference;
    std::shared_ptr<const Trajectory> traj;
    if (std::filesystem::exists(path)) {
        std::ifstream in(path);
        auto loaded = std::make_shared<Trajectory>(read_trajectory_csv(in));
        if (loaded->mesh.n != r.steps / r.stride) {
            throw DomainError("reference cache " + path.string() + " has an unexpected row count");
        }
        // Rebuild the mesh from the recipe so node positions match exactly.
        loaded->mesh = Mesh{problem.tvp.a, problem.tvp.b, loaded->mesh.n};
        traj = std::move(loaded);
    } else {
        auto built = std::make_shared<Trajectory>(generate_reference(problem));
        std::filesystem::create_directories(cache_dir);
        std::ostringstream tmp_name;
        tmp_name << path.filename().string() << ".tmp." << ::getpid() << '.' << g_tmp_counter++;
        const std::filesystem::path tmp = cache_dir / tmp_name.str();
        {
            std::ofstream out(tmp);
            write_trajectory_csv(out, *built);
            if (!out) {
                throw DomainError("could not write reference cache " + tmp.string());
            }
        }
        std::filesystem::rename(tmp, path);
        traj = std::move(built);
    }
    g_references.emplace(key, traj);
    return traj;
}

double problem_error(const CatalogProblem& problem, const Trajectory& traj, const std::filesystem::path& cache_dir) {
    if (problem.exact) {
        return max_error(traj, problem.exact);
    }
    return max_error(traj, *reference_trajectory(problem, cache_dir));
}

}  // namespace fracshoot
