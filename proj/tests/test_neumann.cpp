#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wpflow/errors.hpp"
#include "wpflow/neumann.hpp"

using namespace wpflow;
namespace oracle = wpflow::testing;
using std::numbers::pi;

TEST_CASE("eigenfields invert exactly") {
    Grid g = Grid::make_1d(1.0, 64);
    NeumannSolvePlan plan(g);
    for (int k : {1, 3}) {
        Field w = Field::from_function(g, [&](double x, double) { return std::cos(k * pi * x); });
        double lambda = plan.eigenvalue(0, k);
        Field u = plan.solve(w);
        Field expected = (1.0 / lambda) * w;
        Field diff = u - expected;
        CHECK(norm_l2(diff) <= 1e-12 * norm_l2(expected));
    }
}

TEST_CASE("zero maps to zero") {
    Grid g = Grid::make_1d(1.0, 32);
    NeumannSolvePlan plan(g);
    Field u = plan.solve(Field(g, 0.0));
    CHECK(norm_l2(u) == 0.0);
    CHECK(plan.dual_norm_sq(Field(g, 0.0)) == 0.0);
}

TEST_CASE("solve inverts the negative laplacian on mean-zero data") {
    std::mt19937 rng(61);
    for (const Grid& g : {Grid::make_1d(1.0, 64), Grid::make_2d(1.0, 2.0, 16, 24)}) {
        NeumannSolvePlan plan(g);
        for (int rep = 0; rep < 10; ++rep) {
            Field w = oracle::mean_zeroed(oracle::random_noise_field(g, rng));
            Field u = plan.solve(w);
            CHECK(std::abs(mean(u)) <= 1e-12 * (norm_l2(u) + 1.0));
            Field resid = laplacian(u) + w;
            CHECK(norm_l2(resid) <= 1e-11 * norm_l2(w));
        }
    }
}

TEST_CASE("dual norm of an eigenfield") {
    Grid g = Grid::make_1d(1.0, 64);
    NeumannSolvePlan plan(g);
    Field w = Field::from_function(g, [&](double x, double) { return std::cos(pi * x); });
    double lambda = plan.eigenvalue(0, 1);
    // <N(w), w> = ||w||^2 / lambda with ||w||^2 = L/2 under the midpoint rule.
    CHECK(plan.dual_norm_sq(w) == doctest::Approx(0.5 / lambda).epsilon(1e-12));
}

TEST_CASE("dual norm is positive away from zero") {
    Grid g = Grid::make_1d(1.0, 48);
    NeumannSolvePlan plan(g);
    std::mt19937 rng(67);
    for (int rep = 0; rep < 50; ++rep) {
        Field w = oracle::mean_zeroed(oracle::random_noise_field(g, rng));
        if (norm_l2(w) == 0.0) continue;
        CHECK(plan.dual_norm_sq(w) > 0.0);
    }
}

TEST_CASE("the inverse is self-adjoint and homogeneous") {
    Grid g = Grid::make_1d(1.0, 64);
    NeumannSolvePlan plan(g);
    std::mt19937 rng(71);
    for (int rep = 0; rep < 10; ++rep) {
        Field u = oracle::mean_zeroed(oracle::random_noise_field(g, rng));
        Field v = oracle::mean_zeroed(oracle::random_noise_field(g, rng));
        double s1 = inner(plan.solve(u), v);
        double s2 = inner(u, plan.solve(v));
        CHECK(std::abs(s1 - s2) <= 1e-11 * (std::abs(s1) + 1.0));

        Field scaled = 3.5 * u;
        Field diff = plan.solve(scaled) - 3.5 * plan.solve(u);
        CHECK(norm_l2(diff) <= 1e-12 * (1.0 + norm_l2(plan.solve(u))));
    }
}

TEST_CASE("spectral and iterative methods agree") {
    std::mt19937 rng(73);
    for (const Grid& g : {Grid::make_1d(1.0, 48), Grid::make_2d(1.0, 1.0, 12, 12)}) {
        NeumannSolvePlan spectral(g, SolveMethod::Spectral);
        NeumannSolvePlan iterative(g, SolveMethod::Iterative, 1e-13);
        for (int rep = 0; rep < 5; ++rep) {
            Field w = oracle::mean_zeroed(oracle::random_noise_field(g, rng));
            Field a = spectral.solve(w);
            Field b = iterative.solve(w);
            Field diff = a - b;
            CHECK(norm_l2(diff) <= 1e-10 * (1.0 + norm_l2(a)));
        }
    }
}

TEST_CASE("a right-hand side with a real mean is rejected") {
    Grid g = Grid::make_1d(1.0, 32);
    NeumannSolvePlan plan(g);
    CHECK_THROWS_AS(plan.solve(Field(g, 1.0)), NonZeroMeanError);
    // Tiny drift is projected out instead.
    Field w = Field::from_function(g, [&](double x, double) { return std::cos(pi * x); });
    for (double& x : w.values) x += 1e-14;
    CHECK_NOTHROW(plan.solve(w));
}

TEST_CASE("shifted solves invert their operators") {
    std::mt19937 rng(79);
    for (const Grid& g : {Grid::make_1d(1.0, 48), Grid::make_2d(1.0, 1.0, 12, 16)}) {
        NeumannSolvePlan plan(g);
        Field w = oracle::random_noise_field(g, rng);
        double t = 1e-3;

        Field u = plan.solve_shifted_biharmonic(w, t);
        Field lap2 = laplacian(laplacian(u));
        Field resid = u + t * lap2 - w;
        CHECK(norm_l2(resid) <= 1e-9 * norm_l2(w));

        Field v = plan.solve_shifted_laplacian(w, 0.7);
        Field resid2 = v - 0.7 * laplacian(v) - w;
        CHECK(norm_l2(resid2) <= 1e-10 * norm_l2(w));
    }
}
