#include "fracshoot/errors.hpp"
#include "fracshoot/mlf.hpp"
#include "fracshoot/problems.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace fracshoot;

namespace {

const std::filesystem::path kCache = FRACSHOOT_TEST_CACHE;

}  // namespace

TEST(Catalog, IdsAndDefaults) {
    EXPECT_EQ(catalog_ids(), (std::vector<std::string>{"ex1", "ex2", "ex3"}));
    const auto ex1 = catalog("ex1");
    EXPECT_EQ(ex1.tvp.alpha, 0.3);
    EXPECT_EQ(ex1.tvp.b, 1.0);
    EXPECT_EQ(ex1.tvp.y_star, 0.25);
    const auto ex3 = catalog("ex3");
    EXPECT_EQ(ex3.tvp.alpha, 0.7);
    EXPECT_EQ(ex3.tvp.b, 20.0);
    EXPECT_FALSE(static_cast<bool>(ex3.exact));
    ASSERT_TRUE(ex3.reference.has_value());
    EXPECT_EQ(ex3.reference->steps, 2000000u);
    for (const auto& id : catalog_ids()) {
        const auto p = catalog(id);
        EXPECT_NE(static_cast<bool>(p.exact), p.reference.has_value()) << id;
        EXPECT_EQ(p.steps.size(), 3u);
    }
}

TEST(Catalog, ExampleOneClosedFormHitsTerminalValue) {
    for (double alpha : {0.3, 0.5, 0.8}) {
        const auto p = catalog("ex1", alpha);
        EXPECT_NEAR(p.exact(1.0), 0.25, 1e-15);
        EXPECT_EQ(p.exact(0.0), 0.0);
    }
}

TEST(Catalog, ExampleOneSolvesItsEquation) {
    // Caputo derivative of the closed form by quadrature, compared with the
    // right-hand side along the solution.
    const double alpha = 0.3;
    const auto p = catalog("ex1", alpha);
    const auto y_prime = [=](double t) {
        return 8.0 * std::pow(t, 7.0) - 3.0 * (4.0 + alpha / 2.0) * std::pow(t, 3.0 + alpha / 2.0) +
               2.25 * alpha * std::pow(t, alpha - 1.0);
    };
    for (int i = 1; i <= 10; ++i) {
        const double t = 0.1 * i;
        const double lhs = oracle::caputo_derivative(y_prime, alpha, t);
        EXPECT_NEAR(lhs, p.tvp.rhs(t, p.exact(t)), 1e-6) << "t " << t;
    }
}

TEST(Catalog, ExampleTwoValues) {
    const auto p = catalog("ex2");
    EXPECT_DOUBLE_EQ(p.exact(0.0), 2.8);
    EXPECT_NEAR(p.exact(7.0), p.tvp.y_star, 1e-14);
    EXPECT_NEAR(p.tvp.y_star, 0.6476, 1e-4);
    EXPECT_NEAR(p.tvp.y_star, 2.8 * oracle::mittag_leffler(3, 10, -1.5 * std::pow(7.0, 0.3)), 1e-12);
    EXPECT_EQ(p.tvp.rhs(1.0, 2.0), -3.0);
}

TEST(Catalog, RejectsBadRequests) {
    EXPECT_THROW(catalog("ex4"), DomainError);
    EXPECT_THROW(catalog("ex1", 1.0), DomainError);
    EXPECT_THROW(catalog("ex1", 0.0), DomainError);
    EXPECT_THROW(catalog("ex3", 0.5), DomainError);
    EXPECT_NO_THROW(catalog("ex3", 0.7));
}

TEST(MaxError, AgainstExactSolution) {
    Trajectory traj{Mesh{0.0, 1.0, 10}, {}};
    for (std::size_t j = 0; j <= 10; ++j) {
        traj.values.push_back(std::sin(traj.mesh.node(j)));
    }
    EXPECT_EQ(max_error(traj, [](double t) { return std::sin(t); }), 0.0);
    EXPECT_NEAR(max_error(traj, [](double t) { return std::sin(t) - 1e-3; }), 1e-3, 1e-15);
}

TEST(MaxError, AgainstReferenceTrajectory) {
    Trajectory fine{Mesh{0.0, 2.0, 40}, {}};
    for (std::size_t j = 0; j <= 40; ++j) {
        fine.values.push_back(fine.mesh.node(j) * fine.mesh.node(j));
    }
    Trajectory coarse{Mesh{0.0, 2.0, 10}, {}};
    for (std::size_t j = 0; j <= 10; ++j) {
        coarse.values.push_back(coarse.mesh.node(j) * coarse.mesh.node(j) + (j == 7 ? 0.25 : 0.0));
    }
    EXPECT_NEAR(max_error(coarse, fine), 0.25, 1e-15);
    EXPECT_EQ(max_error(fine, fine), 0.0);

    Trajectory odd{Mesh{0.0, 2.0, 3}, {0.0, 0.0, 0.0, 0.0}};
    EXPECT_THROW(max_error(odd, fine), MetricError);
    Trajectory other_interval{Mesh{0.0, 1.0, 10}, std::vector<double>(11, 0.0)};
    EXPECT_THROW(max_error(other_interval, fine), MetricError);
    EXPECT_THROW(max_error(fine, coarse), MetricError);
}

TEST(Reference, FileNameIsContentAddressed) {
    EXPECT_EQ(reference_file_name(catalog("ex3")), "ex3_a0.7_bdf2_N2000000_s100.csv");
}

TEST(Reference, ExampleThreeTerminalValue) {
    const auto p = catalog("ex3");
    const auto ref = reference_trajectory(p, kCache);
    ASSERT_TRUE(ref);
    EXPECT_EQ(ref->mesh.n, 20000u);
    EXPECT_EQ(ref->values.front(), 1.0);
    EXPECT_NEAR(ref->terminal(), 0.8360565, 5e-7);
    EXPECT_TRUE(std::filesystem::exists(kCache / reference_file_name(p)));

    // A second request comes from memory and is the same object.
    EXPECT_EQ(reference_trajectory(p, kCache), ref);
}

TEST(Reference, DiskCacheRoundTrip) {
    const auto p = catalog("ex3");
    const auto ref = reference_trajectory(p, kCache);
    std::ifstream in(kCache / reference_file_name(p));
    const auto loaded = read_trajectory_csv(in);
    EXPECT_EQ(loaded.values, ref->values);
}

TEST(Reference, ProblemErrorUsesReference) {
    const auto p = catalog("ex3");
    const auto ref = reference_trajectory(p, kCache);
    Trajectory coarse{Mesh{0.0, 20.0, 500}, {}};
    for (std::size_t j = 0; j <= 500; ++j) {
        coarse.values.push_back(ref->values[j * 40] + 1e-4);
    }
    EXPECT_NEAR(problem_error(p, coarse, kCache), 1e-4, 1e-15);

    const auto ex2 = catalog("ex2");
    Trajectory exact{Mesh{0.0, 7.0, 7}, {}};
    for (std::size_t j = 0; j <= 7; ++j) {
        exact.values.push_back(ex2.exact(static_cast<double>(j)));
    }
    EXPECT_EQ(problem_error(ex2, exact, kCache), 0.0);
}

TEST(Reference, DefaultCacheDirHonoursEnvironment) {
    ::setenv("FRACSHOOT_CACHE_DIR", "/tmp/somewhere", 1);
    EXPECT_EQ(default_cache_dir(), std::filesystem::path("/tmp/somewhere"));
    ::unsetenv("FRACSHOOT_CACHE_DIR");
    EXPECT_EQ(default_cache_dir(), std::filesystem::path(".fracshoot-cache"));
}
