#include "fracshoot/errors.hpp"
#include "fracshoot/fode.hpp"
#include "fracshoot/mlf.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

using namespace fracshoot;

namespace {

const Method kAllMethods[] = {Method::AdamsPECE, Method::FBDF2, Method::FTrapezoidal};

SolverConfig config_for(Method m) {
    SolverConfig cfg;
    cfg.method = m;
    return cfg;
}

double ex1_exact(double t, double alpha) {
    return std::pow(t, 8.0) - 3.0 * std::pow(t, 4.0 + alpha / 2.0) + 2.25 * std::pow(t, alpha);
}

// Right-hand side of the first catalog example, written out independently.
Rhs ex1_rhs(double alpha) {
    return [alpha](double t, double y) {
        const double inner = 1.5 * std::pow(t, alpha / 2.0) - std::pow(t, 4.0);
        return 40320.0 / std::tgamma(9.0 - alpha) * std::pow(t, 8.0 - alpha) -
               3.0 * std::tgamma(5.0 + alpha / 2.0) / std::tgamma(5.0 - alpha / 2.0) * std::pow(t, 4.0 - alpha / 2.0) +
               2.25 * std::tgamma(alpha + 1.0) + inner * inner * inner - std::pow(std::abs(y), 1.5);
    };
}

double max_error_vs(const Trajectory& traj, const std::function<double(double)>& exact) {
    double worst = 0.0;
    for (std::size_t j = 0; j < traj.values.size(); ++j) {
        worst = std::max(worst, std::abs(traj.values[j] - exact(traj.mesh.node(j))));
    }
    return worst;
}

FractionalIVP ex2_ivp(double b = 7.0) {
    return FractionalIVP{0.3, 0.0, b, [](double, double y) { return -1.5 * y; }, 2.8};
}

double ex2_exact(double t) { return 2.8 * mittag_leffler(0.3, -1.5 * std::pow(t, 0.3)); }

}  // namespace

TEST(Mesh, WithStepChecksCommensurability) {
    const auto m = Mesh::with_step(0.0, 7.0, 0.0035);
    EXPECT_EQ(m.n, 2000u);
    EXPECT_EQ(m.node(0), 0.0);
    EXPECT_EQ(m.node(m.n), 7.0);
    EXPECT_THROW(Mesh::with_step(0.0, 1.0, 0.3), DomainError);
    EXPECT_THROW(Mesh::with_step(1.0, 1.0, 0.1), DomainError);
    EXPECT_THROW(Mesh::with_step(0.0, 1.0, -0.1), DomainError);
}

TEST(SolveIvp, ZeroRhsKeepsInitialValue) {
    for (Method m : kAllMethods) {
        const FractionalIVP ivp{0.4, 0.0, 2.0, [](double, double) { return 0.0; }, 3.7};
        const auto traj = solve_ivp(ivp, Mesh{0.0, 2.0, 300}, config_for(m));
        ASSERT_EQ(traj.values.size(), 301u);
        for (double v : traj.values) {
            EXPECT_NEAR(v, 3.7, 1e-14) << method_name(m);
        }
        EXPECT_EQ(traj.values[0], 3.7);
    }
}

TEST(SolveIvp, ConstantForcingIsReproduced) {
    // D^a y = Gamma(1+a) has the solution y0 + t^a, which every method
    // integrates without discretisation error.
    const double alpha = 0.35;
    const FractionalIVP ivp{alpha, 0.0, 1.0, [=](double, double) { return std::tgamma(1.0 + alpha); }, 0.5};
    for (Method m : kAllMethods) {
        const auto traj = solve_ivp(ivp, Mesh{0.0, 1.0, 200}, config_for(m));
        EXPECT_LE(max_error_vs(traj, [=](double t) { return 0.5 + std::pow(t, alpha); }), 1e-11) << method_name(m);
    }
}

TEST(SolveIvp, ExampleOneAdamsErrorMagnitude) {
    const double alpha = 0.3;
    const FractionalIVP ivp{alpha, 0.0, 1.0, ex1_rhs(alpha), 0.0};
    const auto traj = solve_ivp(ivp, Mesh::with_step(0.0, 1.0, 0.001), config_for(Method::AdamsPECE));
    const double err = max_error_vs(traj, [=](double t) { return ex1_exact(t, alpha); });
    EXPECT_LT(err, 2.9e-6 * 2.0);
    EXPECT_GT(err, 1e-7);
}

TEST(SolveIvp, ExampleTwoBdf2ErrorMagnitude) {
    const auto traj = solve_ivp(ex2_ivp(), Mesh::with_step(0.0, 7.0, 0.0035), config_for(Method::FBDF2));
    const double err = max_error_vs(traj, ex2_exact);
    EXPECT_LT(err, 1.3e-6 * 2.0);
    EXPECT_GT(err, 1.3e-6 / 2.0);
}

TEST(SolveIvp, RefinementReducesExampleTwoError) {
    double previous = 1.0;
    for (double h : {0.014, 0.007, 0.0035}) {
        const auto traj = solve_ivp(ex2_ivp(), Mesh::with_step(0.0, 7.0, h), config_for(Method::FBDF2));
        const double err = max_error_vs(traj, ex2_exact);
        EXPECT_LT(err, previous) << "h " << h;
        previous = err;
    }
}

TEST(SolveIvp, LinearDecayAllMethodsConverge) {
    // D^a y = -y, y(0) = 1; exact E_a(-t^a).
    const double alpha = 0.6;
    const FractionalIVP ivp{alpha, 0.0, 2.0, [](double, double y) { return -y; }, 1.0};
    auto exact = [=](double t) { return mittag_leffler(alpha, -std::pow(t, alpha)); };
    for (Method m : kAllMethods) {
        const double coarse = max_error_vs(solve_ivp(ivp, Mesh{0.0, 2.0, 200}, config_for(m)), exact);
        const double fine = max_error_vs(solve_ivp(ivp, Mesh{0.0, 2.0, 800}, config_for(m)), exact);
        EXPECT_LT(fine, coarse / 2.5) << method_name(m);
        EXPECT_LT(fine, 1e-3) << method_name(m);
    }
}

TEST(SolveIvp, DeterministicBitForBit) {
    const double alpha = 0.3;
    const FractionalIVP ivp{alpha, 0.0, 1.0, ex1_rhs(alpha), 0.1};
    for (Method m : kAllMethods) {
        const Mesh mesh{0.0, 1.0, 1000};
        const auto first = solve_ivp(ivp, mesh, config_for(m));
        clear_weight_cache();
        const auto second = solve_ivp(ivp, mesh, config_for(m));
        SolverConfig uncached = config_for(m);
        uncached.cache_weights = false;
        const auto third = solve_ivp(ivp, mesh, uncached);
        EXPECT_EQ(first.values, second.values) << method_name(m);
        EXPECT_EQ(first.values, third.values) << method_name(m);
    }
}

TEST(SolveIvp, FastHistoryMatchesDirectSummation) {
    const double alpha = 0.3;
    const FractionalIVP ivp{alpha, 0.0, 1.0, ex1_rhs(alpha), 0.0};
    for (Method m : kAllMethods) {
        SolverConfig fast = config_for(m);
        SolverConfig slow = config_for(m);
        slow.fft_threshold = 1u << 20;
        const auto a = solve_ivp(ivp, Mesh{0.0, 1.0, 2000}, fast);
        const auto b = solve_ivp(ivp, Mesh{0.0, 1.0, 2000}, slow);
        double worst = 0.0;
        for (std::size_t j = 0; j < a.values.size(); ++j) {
            worst = std::max(worst, std::abs(a.values[j] - b.values[j]));
        }
        EXPECT_LT(worst, 1e-12) << method_name(m);
    }
}

TEST(SolveIvp, ConcurrentSolvesAgree) {
    const double alpha = 0.3;
    const FractionalIVP ivp{alpha, 0.0, 1.0, ex1_rhs(alpha), 0.0};
    clear_weight_cache();
    const auto expected = solve_ivp(ivp, Mesh{0.0, 1.0, 500}, config_for(Method::FBDF2));
    clear_weight_cache();
    std::atomic<int> mismatches{0};
    {
        std::vector<std::jthread> pool;
        for (int i = 0; i < 4; ++i) {
            pool.emplace_back([&] {
                const auto traj = solve_ivp(ivp, Mesh{0.0, 1.0, 500}, config_for(Method::FBDF2));
                if (traj.values != expected.values) {
                    ++mismatches;
                }
            });
        }
    }
    EXPECT_EQ(mismatches.load(), 0);
}

TEST(SolveIvp, AdamsEvaluationCount) {
    // One evaluation at t_0, then predict, corrector_iters corrections and a
    // final evaluate per step.
    for (int iters : {1, 4}) {
        std::size_t calls = 0;
        const FractionalIVP ivp{0.5, 0.0, 1.0, [&](double, double y) {
                                    ++calls;
                                    return -y;
                                },
                                1.0};
        SolverConfig cfg = config_for(Method::AdamsPECE);
        cfg.corrector_iters = iters;
        solve_ivp(ivp, Mesh{0.0, 1.0, 100}, cfg);
        EXPECT_EQ(calls, 1u + 100u * static_cast<std::size_t>(iters + 1));
    }
}

TEST(SolveIvp, NonFiniteRhsRaisesRhsError) {
    const FractionalIVP ivp{0.5, 0.0, 1.0, [](double t, double y) { return t > 0.5 ? std::nan("") : -y; }, 1.0};
    for (Method m : kAllMethods) {
        try {
            solve_ivp(ivp, Mesh{0.0, 1.0, 100}, config_for(m));
            FAIL() << "expected RhsError";
        } catch (const RhsError& e) {
            EXPECT_GT(e.t(), 0.5);
        }
    }
}

TEST(SolveIvp, NewtonFailureReportsStep) {
    // A cap of one Newton iteration cannot satisfy the increment test.
    const FractionalIVP ivp{0.5, 0.0, 1.0, [](double, double y) { return -y * y * y; }, 2.0};
    SolverConfig cfg = config_for(Method::FBDF2);
    cfg.newton_max_iters = 1;
    try {
        solve_ivp(ivp, Mesh{0.0, 1.0, 50}, cfg);
        FAIL() << "expected SolverError";
    } catch (const SolverError& e) {
        EXPECT_GE(e.step(), 1u);
    }
}

TEST(SolveIvp, RejectsInvalidInput) {
    const FractionalIVP ok{0.5, 0.0, 1.0, [](double, double y) { return -y; }, 1.0};
    EXPECT_THROW(solve_ivp(ok, Mesh{0.0, 2.0, 10}, {}), DomainError);
    FractionalIVP bad_order = ok;
    bad_order.alpha = 1.5;
    EXPECT_THROW(solve_ivp(bad_order, Mesh{0.0, 1.0, 10}, {}), DomainError);
    FractionalIVP no_rhs = ok;
    no_rhs.rhs = nullptr;
    EXPECT_THROW(solve_ivp(no_rhs, Mesh{0.0, 1.0, 10}, {}), DomainError);
    SolverConfig bad_cfg;
    bad_cfg.corrector_iters = 0;
    EXPECT_THROW(solve_ivp(ok, Mesh{0.0, 1.0, 10}, bad_cfg), DomainError);
    // alpha = 0.1 needs ten starting nodes.
    FractionalIVP small = ok;
    small.alpha = 0.1;
    EXPECT_THROW(solve_ivp(small, Mesh{0.0, 1.0, 5}, config_for(Method::FBDF2)), DomainError);
    EXPECT_NO_THROW(solve_ivp(small, Mesh{0.0, 1.0, 10}, config_for(Method::FBDF2)));
}

TEST(ExtendSolution, SameEndpointIsPlainSolve) {
    const auto cfg = config_for(Method::FBDF2);
    const auto base = solve_ivp(ex2_ivp(), Mesh::with_step(0.0, 7.0, 0.01), cfg);
    const auto ext = extend_solution(base, ex2_ivp(), 7.0, cfg);
    EXPECT_EQ(ext.values, base.values);
}

TEST(ExtendSolution, RestrictionMatchesUnextendedSolve) {
    for (Method m : kAllMethods) {
        const auto cfg = config_for(m);
        const auto base = solve_ivp(ex2_ivp(), Mesh::with_step(0.0, 7.0, 0.01), cfg);
        const auto ext = extend_solution(base, ex2_ivp(), 10.0, cfg);
        ASSERT_EQ(ext.mesh.n, 1000u);
        EXPECT_EQ(ext.mesh.b, 10.0);
        for (std::size_t j = 0; j <= base.mesh.n; ++j) {
            EXPECT_NEAR(ext.values[j], base.values[j], 1e-12) << method_name(m) << " j " << j;
        }
    }
}

TEST(ExtendSolution, ZeroRhsContinuesConstant) {
    const FractionalIVP ivp{0.5, 0.0, 1.0, [](double, double) { return 0.0; }, -1.25};
    const auto base = solve_ivp(ivp, Mesh{0.0, 1.0, 20}, {});
    const auto ext = extend_solution(base, ivp, 3.0, {});
    EXPECT_EQ(ext.mesh.n, 60u);
    for (double v : ext.values) {
        EXPECT_NEAR(v, -1.25, 1e-14);
    }
}

TEST(ExtendSolution, RejectsEarlierEndpoint) {
    const auto base = solve_ivp(ex2_ivp(), Mesh{0.0, 7.0, 100}, {});
    EXPECT_THROW(extend_solution(base, ex2_ivp(), 6.0, {}), DomainError);
    EXPECT_THROW(extend_solution(base, ex2_ivp(), 7.01, {}), DomainError);
}

TEST(TrajectoryCsv, RoundTripIsExact) {
    const auto traj = solve_ivp(ex2_ivp(), Mesh::with_step(0.0, 7.0, 0.014), config_for(Method::AdamsPECE));
    std::stringstream ss;
    write_trajectory_csv(ss, traj);
    EXPECT_EQ(ss.str().substr(0, 4), "t,y\n");
    const auto back = read_trajectory_csv(ss);
    EXPECT_EQ(back.values, traj.values);
    EXPECT_EQ(back.mesh.n, traj.mesh.n);
    EXPECT_EQ(back.mesh.a, traj.mesh.a);
    EXPECT_EQ(back.mesh.b, traj.mesh.b);
}

TEST(TrajectoryCsv, RejectsMalformedInput) {
    std::stringstream no_header("x,y\n0,1\n1,2\n");
    EXPECT_THROW(read_trajectory_csv(no_header), DomainError);
    std::stringstream bad_number("t,y\n0,1\n1,abc\n");
    EXPECT_THROW(read_trajectory_csv(bad_number), DomainError);
    std::stringstream one_row("t,y\n0,1\n");
    EXPECT_THROW(read_trajectory_csv(one_row), DomainError);
}
