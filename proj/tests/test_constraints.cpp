#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wpflow/constraints.hpp"
#include "wpflow/errors.hpp"

using namespace wpflow;
namespace oracle = wpflow::testing;
using std::numbers::pi;

TEST_CASE("constraint spec validation") {
    CHECK_NOTHROW(ConstraintSpec(0.0, 0.5));
    CHECK_NOTHROW(ConstraintSpec(1.0, 0.0));  // infeasibility is caught downstream
    CHECK_THROWS_AS(ConstraintSpec(0.0, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(ConstraintSpec(0.0, 0.5, 0.0), std::invalid_argument);
}

TEST_CASE("minimal area estimates at the wells and the barrier") {
    PotentialParams p(1.0);
    Grid g = Grid::make_1d(1.0, 128);
    CHECK(beta_alpha_estimate(1.0, p, g) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(beta_alpha_estimate(-1.0, p, g) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(beta_alpha_estimate(0.0, p, g) == doctest::Approx(0.25).epsilon(1e-6 / 0.25));
}

TEST_CASE("minimal area estimate never exceeds the constant candidate") {
    PotentialParams p(1.7);
    Grid g = Grid::make_1d(2.0, 64);
    for (double alpha : {-0.7, 0.2, 0.55}) {
        double est = beta_alpha_estimate(alpha, p, g);
        double constant_value = g.measure() * W(alpha, p);
        CHECK(est <= constant_value * (1.0 + 1e-12) + 1e-12);
    }
}

TEST_CASE("feasible construction hits the prescribed level") {
    PotentialParams p(1.0);
    Grid g = Grid::make_1d(1.0, 128);
    ConstraintSpec spec(0.0, 0.5);
    Field phi = oracle::mean_zeroed(
        Field::from_function(g, [](double x, double) { return std::cos(pi * x); }));
    Field w = construct_feasible(spec, phi, p, g);

    CHECK(std::abs(mean(w)) <= spec.tol_mean);
    CHECK(std::abs(area_F(w, p) - spec.beta) <= spec.tol_area * spec.beta);

    // The step length along phi should sit near the continuum root of
    // 3 l^4/32 + l^2 (pi^2-1)/4 = 1/4.
    double lambda = inner(w, phi) / inner(phi, phi);
    double A = 3.0 / 32.0, B = (pi * pi - 1.0) / 4.0;
    double t = (-B + std::sqrt(B * B + 4.0 * A * 0.25)) / (2.0 * A);
    double lambda_cont = std::sqrt(t);
    CHECK(std::abs(lambda - lambda_cont) <= 5e-3);
}

TEST_CASE("feasible construction rejects bad inputs") {
    PotentialParams p(1.0);
    Grid g = Grid::make_1d(1.0, 64);
    Field phi = oracle::mean_zeroed(
        Field::from_function(g, [](double x, double) { return std::cos(pi * x); }));

    CHECK_THROWS_AS(construct_feasible(ConstraintSpec(1.0, 0.0), phi, p, g), InfeasibleBetaError);
    CHECK_THROWS_AS(construct_feasible(ConstraintSpec(0.0, 0.1), phi, p, g), InfeasibleBetaError);
    CHECK_THROWS_AS(construct_feasible(ConstraintSpec(0.0, 0.5), Field(g, 0.0), p, g),
                    ZeroDirectionError);
    Field biased = Field(g, 0.3);
    CHECK_THROWS_AS(construct_feasible(ConstraintSpec(0.0, 0.5), biased, p, g),
                    ZeroDirectionError);
}

TEST_CASE("retraction is a fixed point on the manifold") {
    PotentialParams p(1.0);
    Grid g = Grid::make_1d(1.0, 128);
    ConstraintSpec spec(0.0, 0.5);
    Field phi = oracle::mean_zeroed(
        Field::from_function(g, [](double x, double) { return std::cos(pi * x); }));
    Field w = construct_feasible(spec, phi, p, g);

    Field w2 = retract_to_manifold(w, spec, p);
    Field diff = w2 - w;
    CHECK(norm_l2(diff) <= 1e-13 * (1.0 + norm_l2(w)));
}

TEST_CASE("retraction restores both constraints after a perturbation") {
    PotentialParams p(1.0);
    Grid g = Grid::make_1d(1.0, 128);
    ConstraintSpec spec(0.0, 0.5);
    Field phi = oracle::mean_zeroed(
        Field::from_function(g, [](double x, double) { return std::cos(pi * x); }));
    Field w = construct_feasible(spec, phi, p, g);

    std::mt19937 rng(83);
    for (int rep = 0; rep < 5; ++rep) {
        Field noisy = w;
        Field noise = oracle::mean_zeroed(oracle::random_noise_field(g, rng, 1e-3));
        noisy += noise;
        Field r = retract_to_manifold(noisy, spec, p);
        CHECK(std::abs(mean(r)) <= spec.tol_mean);
        CHECK(std::abs(area_F(r, p) - spec.beta) <= spec.tol_area * spec.beta);
        // Second application is a no-op.
        Field r2 = retract_to_manifold(r, spec, p);
        Field diff = r2 - r;
        CHECK(norm_l2(diff) <= 1e-13 * (1.0 + norm_l2(r)));
    }
}

TEST_CASE("retraction refuses degenerate and far-away inputs") {
    PotentialParams p(1.0);
    Grid g = Grid::make_1d(1.0, 64);
    ConstraintSpec spec(0.0, 0.25 * 1.2);
    CHECK_THROWS_AS(retract_to_manifold(Field(g, 0.0), spec, p), DegenerateDirectionError);
    ConstraintSpec far(0.0, 0.5);
    Field w = Field::from_function(g, [](double x, double) { return 2.0 * std::cos(pi * x); });
    // F of this profile is far above 1.5 * beta.
    CHECK_THROWS_AS(retract_to_manifold(w, far, p), OutsideTrustRegionError);
    Field off = Field(g, 0.5);  // mean far from alpha = 0
    CHECK_THROWS_AS(retract_to_manifold(off, far, p), OutsideTrustRegionError);
}

TEST_CASE("degeneracy-set emptiness test: worked values") {
    PotentialParams p(1.0);
    Grid g = Grid::make_1d(1.0, 64);  // measure 1
    CHECK(z_empty_sufficient(ConstraintSpec(0.0, 0.3), p, g) == true);
    CHECK(z_empty_sufficient(ConstraintSpec(0.0, 0.2), p, g) == false);
    // alpha = 1: threshold is beta > 11/64.
    CHECK(z_empty_sufficient(ConstraintSpec(1.0, 0.172), p, g) == true);
    CHECK(z_empty_sufficient(ConstraintSpec(1.0, 0.1718), p, g) == false);
}

TEST_CASE("degeneracy-set test is monotone in beta") {
    PotentialParams p(0.8);
    Grid g = Grid::make_2d(1.0, 1.5, 8, 8);
    std::mt19937 rng(89);
    std::uniform_real_distribution<double> ua(-1.2, 1.2), ub(0.01, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        double alpha = ua(rng), beta = ub(rng);
        if (z_empty_sufficient(ConstraintSpec(alpha, beta), p, g))
            CHECK(z_empty_sufficient(ConstraintSpec(alpha, beta + 0.5), p, g));
    }
}

TEST_CASE("margin probe over states") {
    PotentialParams p(1.0);
    Grid g = Grid::make_1d(1.0, 64);
    NeumannSolvePlan plan(g);

    PhaseState flat = make_state(Field(g, 0.5), p);  // constant mu
    CHECK(m_M_probe({flat}, plan) == doctest::Approx(0.0).epsilon(1e-13));

    Field w = Field::from_function(g, [](double x, double) { return 0.3 * std::cos(pi * x); });
    PhaseState bent = make_state(w, p);
    double probe = m_M_probe({bent}, plan);
    CHECK(probe > 0.0);
    // min over a superset cannot exceed the subset value
    CHECK(m_M_probe({bent, flat}, plan) <= probe);
    CHECK(m_M_probe({}, plan) == 0.0);
}
