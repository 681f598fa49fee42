#pragma once

#include "fracshoot/history.hpp"
#include "fracshoot/weights.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

namespace fracshoot {

/// Right-hand side f(t, y) of D^alpha y = f(t, y).
using Rhs = std::function<double(double t, double y)>;

/// Caputo initial value problem  D^alpha y = f(t, y), y(a) = y0.
struct FractionalIVP {
    double alpha = 0.5;
    double a = 0.0;
    double b = 1.0;
    Rhs rhs;
    double y0 = 0.0;
};

/// Uniform mesh t_j = a + j h, j = 0..n, with t_n = b.
struct Mesh {
    double a = 0.0;
    double b = 1.0;
    std::size_t n = 1;

    double step() const noexcept { return (b - a) / static_cast<double>(n); }
    double node(std::size_t j) const noexcept {
        return j == n ? b : a + static_cast<double>(j) * step();
    }

    /// Mesh of [a, b] with step h. Throws DomainError unless (b - a)/h is an
    /// integer up to a relative 1e-9.
    static Mesh with_step(double a, double b, double h);
    /// Throws DomainError if the mesh is degenerate.
    void validate() const;
};

struct Trajectory {
    Mesh mesh;
    std::vector<double> values;  // values[j] approximates y(t_j)

    double terminal() const { return values.back(); }
};

struct SolverConfig {
    Method method = Method::FBDF2;
    int corrector_iters = 4;         // Adams only
    double newton_tol = 1e-10;       // implicit methods
    int newton_max_iters = 50;
    std::size_t fft_threshold = kDefaultFftThreshold;
    bool cache_weights = true;       // reuse weight tables across solves

    void validate() const;
};

/// Solves the IVP on `mesh`, whose interval must coincide with the IVP's.
///
/// Adams: predict, then corrector_iters evaluate/correct sweeps, then a final
/// evaluate. BDF2/trapezoidal: convolution quadrature with starting weights;
/// the first few nodes are solved together, every later node by a scalar
/// Newton iteration with a finite-difference derivative.
///
/// Throws DomainError on invalid input, SolverError when Newton fails and
/// RhsError when f returns a non-finite value.
Trajectory solve_ivp(const FractionalIVP& ivp, const Mesh& mesh, const SolverConfig& cfg);

/// Re-solves the IVP started from tvp_solution.values[0] on [a, c] using the
/// same step as the input trajectory. c must be >= b and commensurate with h.
Trajectory extend_solution(const Trajectory& tvp_solution, const FractionalIVP& ivp, double c,
                           const SolverConfig& cfg);

/// Builds and caches the weight tables a solve with these settings needs, so
/// that later solves do not pay for them. No-op when cfg.cache_weights is off.
void warm_weight_cache(double alpha, const Mesh& mesh, const SolverConfig& cfg);

/// Drops every cached weight table.
void clear_weight_cache();

/// CSV with header "t,y" and 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
/// Inverse of write_trajectory_csv. The mesh is rebuilt from the first and
/// last node and the row count; throws DomainError on malformed input.
Trajectory read_trajectory_csv(std::istream& is);

}  // namespace fracshoot
