#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wpflow/functionals.hpp"

using namespace wpflow;
namespace oracle = wpflow::testing;
using std::numbers::pi;

TEST_CASE("double-well values and derivatives") {
    PotentialParams p(1.0);
    CHECK(W(1.0, p) == 0.0);
    CHECK(W(-1.0, p) == 0.0);
    CHECK(W(0.0, p) == doctest::Approx(0.25));
    CHECK(W1(0.5, p) == doctest::Approx(-0.375));
    CHECK(W1(1.0, p) == 0.0);

    PotentialParams p2(2.5);
    CHECK(W(0.0, p2) == doctest::Approx(2.5 / 4.0));
    CHECK(W3(1.0, p2) == doctest::Approx(15.0));

    CHECK_THROWS_AS(PotentialParams(0.0), std::invalid_argument);
    CHECK_THROWS_AS(PotentialParams(-1.0), std::invalid_argument);
}

TEST_CASE("potential derivatives agree with finite differences") {
    PotentialParams p(1.0);
    const double h = 1e-5;
    for (double r : {-1.3, 0.2, 0.9}) {
        double fd1 = (W(r + h, p) - W(r - h, p)) / (2 * h);
        double fd2 = (W1(r + h, p) - W1(r - h, p)) / (2 * h);
        double fd3 = (W2(r + h, p) - W2(r - h, p)) / (2 * h);
        CHECK(fd1 == doctest::Approx(W1(r, p)).epsilon(1e-7));
        CHECK(fd2 == doctest::Approx(W2(r, p)).epsilon(1e-7));
        CHECK(fd3 == doctest::Approx(W3(r, p)).epsilon(1e-7));
    }
}

TEST_CASE("area functional on reference fields") {
    PotentialParams p(1.0);
    Grid g = Grid::make_1d(1.0, 64);
    CHECK(area_F(Field(g, 0.0), p) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(area_F(Field(g, 1.0), p) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(area_F(Field(g, -1.0), p) == doctest::Approx(0.0).epsilon(1e-14));

    // lambda cos(pi x) against the closed-form continuum value.
    Grid g256 = Grid::make_1d(1.0, 256);
    double lam = 0.335;
    Field w = Field::from_function(g256, [&](double x, double) { return lam * std::cos(pi * x); });
    double continuum = 3.0 * std::pow(lam, 4) / 32.0 + lam * lam * (pi * pi - 1.0) / 4.0 + 0.25;
    CHECK(area_F(w, p) == doctest::Approx(continuum).epsilon(2e-3 / continuum));
}

TEST_CASE("chemical potential of constants") {
    PotentialParams p(1.0);
    Grid g = Grid::make_1d(1.0, 32);
    Field mu0 = chemical_potential(Field(g, 0.0), p);
    for (double v : mu0.values) CHECK(v == 0.0);
    Field mu = chemical_potential(Field(g, 0.5), p);
    for (double v : mu.values) CHECK(v == doctest::Approx(-0.375).epsilon(1e-15));
}

TEST_CASE("the chemical potential is the exact discrete gradient of F") {
    PotentialParams p(1.0);
    std::mt19937 rng(31);
    for (const Grid& g : {Grid::make_1d(1.0, 64), Grid::make_2d(1.0, 1.0, 16, 16)}) {
        for (int rep = 0; rep < 5; ++rep) {
            Field w = oracle::random_smooth_field(g, rng, 0.4, 0.6);
            Field d = oracle::random_smooth_field(g, rng, 0.3, 1.0);
            double dn = norm_l2(d);
            for (double& x : d.values) x /= dn;
            double exact = inner(chemical_potential(w, p), d);
            auto F = [&](const Field& u) { return area_F(u, p); };
            double fd = oracle::directional_fd(F, w, d, 1e-5);
            CHECK(fd == doctest::Approx(exact).epsilon(1e-6));
        }
    }
}

TEST_CASE("gradient of F converges at second order in the step") {
    PotentialParams p(1.0);
    Grid g = Grid::make_1d(1.0, 64);
    std::mt19937 rng(37);
    double err4 = 0.0, err5 = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
        Field w = oracle::random_smooth_field(g, rng, 0.5, 0.7);
        Field d = oracle::random_smooth_field(g, rng, 0.4, 1.0);
        double dn = norm_l2(d);
        for (double& x : d.values) x /= dn;
        double exact = inner(chemical_potential(w, p), d);
        auto F = [&](const Field& u) { return area_F(u, p); };
        err4 += std::abs(oracle::directional_fd(F, w, d, 1e-4) - exact);
        err5 += std::abs(oracle::directional_fd(F, w, d, 1e-5) - exact);
    }
    double ratio = err4 / err5;  // second-order central differences: about 100
    CHECK(ratio >= 50.0);
    CHECK(ratio <= 200.0);
}

TEST_CASE("free energy on reference fields") {
    PotentialParams p(1.0);
    Grid g = Grid::make_1d(1.0, 64);
    CHECK(energy_E(Field(g, 1.0), p) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(energy_E(Field(g, -1.0), p) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(energy_E(Field(g, 0.0), p) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(energy_E(Field(g, 0.5), p) == doctest::Approx(0.5 * 0.375 * 0.375).epsilon(1e-14));

    std::mt19937 rng(41);
    for (int rep = 0; rep < 50; ++rep) {
        Field w = oracle::random_noise_field(g, rng);
        CHECK(energy_E(w, p) >= 0.0);
    }
}

TEST_CASE("grad_E vanishes at the wells and matches finite differences") {
    PotentialParams p(1.0);
    Grid g = Grid::make_1d(1.0, 32);
    Field gw = grad_E(Field(g, 1.0), p);
    for (double v : gw.values) CHECK(v == doctest::Approx(0.0).epsilon(1e-15));

    std::mt19937 rng(43);
    for (int rep = 0; rep < 5; ++rep) {
        Field w = oracle::random_smooth_field(g, rng, 0.3, 0.6);
        Field d = oracle::random_smooth_field(g, rng, 0.2, 1.0);
        double dn = norm_l2(d);
        for (double& x : d.values) x /= dn;
        double exact = inner(grad_E(w, p), d);
        auto E = [&](const Field& u) { return energy_E(u, p); };
        double fd = oracle::directional_fd(E, w, d, 1e-5);
        CHECK(fd == doctest::Approx(exact).epsilon(1e-6));
    }

    // Componentwise reference gradient on a tiny grid.
    Grid tiny = Grid::make_1d(1.0, 16);
    Field w = oracle::random_smooth_field(tiny, rng, 0.3, 0.5);
    auto E = [&](const Field& u) { return energy_E(u, p); };
    Field g_fd = oracle::componentwise_fd_gradient(E, w, 1e-5);
    Field g_an = grad_E(w, p);
    Field diff = g_fd - g_an;
    CHECK(norm_l2(diff) <= 1e-6 * (1.0 + norm_l2(g_an)));
}

TEST_CASE("make_state caches are self-consistent") {
    PotentialParams p(1.0);
    Grid g = Grid::make_1d(1.0, 64);

    PhaseState s1 = make_state(Field(g, 1.0), p);
    CHECK(s1.energy == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(s1.area == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(s1.margin == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(s1.mean_v == doctest::Approx(1.0).epsilon(1e-14));

    PhaseState s2 = make_state(Field(g, 0.5), p);
    CHECK(s2.margin == doctest::Approx(0.0).epsilon(1e-13));  // mu is constant

    Field w = Field::from_function(g, [](double x, double) { return 0.3 * std::cos(pi * x); });
    PhaseState s3 = make_state(w, p);
    CHECK(s3.margin > 0.0);
    CHECK(s3.energy == doctest::Approx(energy_E(w, p)).epsilon(1e-13));
    CHECK(s3.area == doctest::Approx(area_F(w, p)).epsilon(1e-13));
    CHECK(s3.mean_v == doctest::Approx(mean(w)).epsilon(1e-13));
    Field mu = chemical_potential(w, p);
    Field dmu = s3.mu - mu;
    CHECK(norm_l2(dmu) == 0.0);
}

TEST_CASE("E vanishes exactly when the chemical potential does") {
    PotentialParams p(1.0);
    Grid g = Grid::make_1d(1.0, 32);
    std::mt19937 rng(47);
    for (int rep = 0; rep < 10; ++rep) {
        Field w = oracle::random_smooth_field(g, rng, 0.2, 0.4);
        PhaseState s = make_state(w, p);
        double mu_norm_sq = inner(s.mu, s.mu);
        if (s.energy <= 1e-12)
            CHECK(mu_norm_sq <= 2.1e-12);
        else
            CHECK(mu_norm_sq > 0.0);
    }
}

TEST_CASE("F, E, mu are invariant under grid reflection") {
    PotentialParams p(1.3);
    Grid g = Grid::make_1d(1.0, 48);
    std::mt19937 rng(53);
    Field w = oracle::random_noise_field(g, rng);
    Field wr(g);
    for (int i = 0; i < g.nx; ++i) wr[i] = w[g.nx - 1 - i];
    CHECK(area_F(wr, p) == doctest::Approx(area_F(w, p)).epsilon(1e-13));
    CHECK(energy_E(wr, p) == doctest::Approx(energy_E(w, p)).epsilon(1e-13));
    Field mu = chemical_potential(w, p);
    Field mur = chemical_potential(wr, p);
    for (int i = 0; i < g.nx; ++i) CHECK(mur[i] == doctest::Approx(mu[g.nx - 1 - i]).epsilon(1e-13));
}
