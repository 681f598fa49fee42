#pragma once

#include "fracshoot/fode.hpp"
#include "fracshoot/shooting.hpp"

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fracshoot {

/// How a reference solution is produced when no closed form is known: the
/// IVP from `y0` solved with `steps` steps, keeping every `stride`-th node.
struct ReferenceRecipe {
    Method method = Method::FBDF2;
    std::size_t steps = 0;
    std::size_t stride = 1;
    double y0 = 0.0;
};

struct CatalogProblem {
    std::string id;
    FractionalTVP tvp;
    std::function<double(double)> exact;      // empty when only a reference exists
    std::optional<ReferenceRecipe> reference;
    std::vector<double> steps;                // step sizes of the published tables
};

/// Known ids: ex1, ex2, ex3.
std::vector<std::string> catalog_ids();

/// Throws DomainError for an unknown id, an order outside (0, 1), or an order
/// override for ex3 (its terminal value is only known for alpha = 0.7).
CatalogProblem catalog(std::string_view id, std::optional<double> alpha_override = std::nullopt);

/// max_j |traj_j - exact(t_j)|.
double max_error(const Trajectory& traj, const std::function<double(double)>& exact);

/// Maximum deviation at the nodes of `traj`, which must all be nodes of
/// `reference` (same interval, reference step count a multiple of ours).
/// Throws MetricError otherwise.
double max_error(const Trajectory& traj, const Trajectory& reference);

/// Content-addressed cache file name, e.g. ex3_a0.7_bdf2_N2000000_s100.csv.
std::string reference_file_name(const CatalogProblem& problem);

/// Directory used when none is given: $FRACSHOOT_CACHE_DIR, else
/// ".fracshoot-cache" in the working directory.
std::filesystem::path default_cache_dir();

/// Loads the reference trajectory from `cache_dir`, generating and storing it
/// first if needed. Files are written under a temporary name and renamed into
/// place, so concurrent generators never expose a partial file. Loaded
/// references are also kept in memory for the life of the process.
std::shared_ptr<const Trajectory> reference_trajectory(const CatalogProblem& problem,
                                                       const std::filesystem::path& cache_dir);

/// Error of `traj` against whatever truth the problem carries.
double problem_error(const CatalogProblem& problem, const Trajectory& traj,
                     const std::filesystem::path& cache_dir);

}  // namespace fracshoot
