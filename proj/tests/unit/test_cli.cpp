#include "fracshoot/bench.hpp"

#include <json.hpp>

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <sstream>
#include <string>

namespace {

struct RunResult {
    int status = -1;
    std::string out;
};

// Runs the CLI with stderr discarded and returns exit status and stdout.
RunResult run_raw(const std::string& args) {
    const std::string cmd = std::string(FRACSHOOT_CLI) + " " + args + " 2>/dev/null";
    RunResult r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (pipe == nullptr) {
        return r;
    }
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        r.out.append(buf.data(), n);
    }
    const int raw = ::pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

}  // namespace

TEST(Cli, MlfAtZeroPrintsOne) {
    const auto r = run_raw("mlf --alpha 0.3 --z 0");
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "1");
    EXPECT_NE(r.out.find("regime=trivial"), std::string::npos);
}

TEST(Cli, MlfJson) {
    const auto r = run_raw("mlf --alpha 1 --z 1 --format json");
    ASSERT_EQ(r.status, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["value"].get<double>(), 2.718281828459045, 1e-15);
}

TEST(Cli, ShootExampleOneFiveShots) {
    const auto r = run_raw("shoot --problem ex1 --method adams --step 0.0005 --eps 1e-6 --strategy auto");
    ASSERT_EQ(r.status, 0);
    std::istringstream in(r.out);
    const auto rows = fracshoot::read_summary_csv(in);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].shots, 5);
    EXPECT_EQ(rows[0].strategy, "auto");
    EXPECT_EQ(rows[0].method, "secting");
    EXPECT_LT(rows[0].max_error, 2e-6);
}

TEST(Cli, ShootJsonReport) {
    const auto r = run_raw("shoot --problem ex2 --method bdf2 --step 0.014 --strategy midpoint --format json");
    ASSERT_EQ(r.status, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_TRUE(j["converged"].get<bool>());
    EXPECT_EQ(j["estimate"]["strategy"], "midpoint");
}

TEST(Cli, BenchExampleTwoHasTwentyFourRows) {
    const auto r = run_raw("bench --problem ex2 --eps 1e-10 --repetitions 1");
    ASSERT_EQ(r.status, 0);
    std::istringstream in(r.out);
    const auto rows = fracshoot::read_summary_csv(in);
    EXPECT_EQ(rows.size(), 24u);
}

TEST(Cli, SolvePrintsTrajectory) {
    const auto r = run_raw("solve --problem ex2 --step 0.7");
    ASSERT_EQ(r.status, 0);
    std::istringstream in(r.out);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "t,y");
    std::size_t rows = 0;
    for (std::string line; std::getline(in, line);) {
        ++rows;
    }
    EXPECT_EQ(rows, 11u);
}

TEST(Cli, ValidationErrorsExitOne) {
    EXPECT_EQ(run_raw("shoot --bogus-flag").status, 1);
    EXPECT_EQ(run_raw("shoot --problem ex9").status, 1);
    EXPECT_EQ(run_raw("solve --problem ex1 --step 0.3").status, 1);
    EXPECT_EQ(run_raw("mlf --alpha 2 --z 1").status, 1);
    EXPECT_EQ(run_raw("").status, 1);
}

TEST(Cli, NumericalFailureExitsTwo) {
    EXPECT_EQ(run_raw("shoot --problem ex3 --step 0.04 --eps 1e-10 --max-shots 2 --cache-dir " FRACSHOOT_TEST_CACHE).status, 2);
    EXPECT_EQ(run_raw("mlf --alpha 0.6 --z -4 --tol 1e-30").status, 2);
}
