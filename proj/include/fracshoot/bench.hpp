#pragma once

#include "fracshoot/problems.hpp"
#include "fracshoot/shooting.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fracshoot {

/// Bisection or one of the proportional-secting variants.
enum class ShootingStrategy { Bisection, Unit, Midpoint, Auto };

std::string_view shooting_strategy_name(ShootingStrategy s) noexcept;
/// Accepts "bisection", "unit", "midpoint" and "auto".
ShootingStrategy parse_shooting_strategy(std::string_view name);

/// Runs the matching algorithm for `strategy`; cfg.c_strategy is overridden
/// for the secting variants.
ShootingReport run_shooting(const FractionalTVP& tvp, ShootingConfig cfg, ShootingStrategy strategy);

struct ExperimentMatrix {
    std::string problem = "ex1";
    std::optional<double> alpha;
    std::vector<Method> solvers{Method::AdamsPECE, Method::FBDF2};
    std::vector<double> steps;  // empty: the problem's published step sizes
    std::vector<double> eps{1e-6};
    std::vector<ShootingStrategy> strategies{ShootingStrategy::Bisection, ShootingStrategy::Unit,
                                             ShootingStrategy::Midpoint, ShootingStrategy::Auto};
    int repetitions = 3;              // timing runs per cell, the median is reported
    int max_shots = 100;              // per-run cap on IVP solves
    int workers = 0;                  // <= 0: $FRACSHOOT_WORKERS, else 1
    bool include_setup_time = false;  // time weight construction as part of each solve
    std::filesystem::path cache_dir;  // reference cache; empty: default_cache_dir()

    /// Throws DomainError on empty lists, bad repetitions or steps that do
    /// not divide the interval.
    void validate(const CatalogProblem& problem) const;
};

/// One table cell.
struct SummaryRow {
    std::string method;    // "secting" or "bisection"
    std::string solver;    // method_name of the IVP solver
    double h = 0.0;
    double eps = 0.0;
    std::string strategy;  // shooting_strategy_name
    int shots = 0;
    double max_error = 0.0;
    double wall_time_s = 0.0;
    bool converged = true;

    bool operator==(const SummaryRow&) const = default;
};

/// Worker count from $FRACSHOOT_WORKERS (at least 1).
int default_worker_count();

/// One row per (solver, h, eps, strategy) in that nesting order. A cell that
/// fails numerically is reported with shots = max_shots, converged = false and
/// a NaN error instead of aborting the run.
std::vector<SummaryRow> run_matrix(const ExperimentMatrix& m);

/// Summary row of one shooting run.
SummaryRow summarize(const ShootingReport& report, const ShootingConfig& cfg, ShootingStrategy strategy,
                     double max_error);

/// Header plus rows, numbers at 17 significant digits.
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);
/// Inverse of write_summary_csv. Throws DomainError on malformed input.
std::vector<SummaryRow> read_summary_csv(std::istream& is);
void write_summary_json(std::ostream& os, const std::vector<SummaryRow>& rows);
/// Aligned text table with numbers rounded to 2 significant digits.
void write_summary_table(std::ostream& os, const std::vector<SummaryRow>& rows);

/// Full shot history, the proportionality estimate and the summary as JSON.
void write_report_json(std::ostream& os, const ShootingReport& report, const SummaryRow& summary);

/// Writes shot_NN.csv for every shot plus manifest.csv listing each shot's
/// initial guess, terminal value, residual and file name. Returns the report.
ShootingReport emit_figure_bundle(const CatalogProblem& problem, ShootingStrategy strategy, ShootingConfig cfg,
                                  const std::filesystem::path& out_dir);

}  // namespace fracshoot
