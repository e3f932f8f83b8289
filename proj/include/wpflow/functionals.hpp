#pragma once

#include "wpflow/grid.hpp"

namespace wpflow {

/// Parameters of the quartic double-well W(r) = a (r^2 - 1)^2 / 4.
struct PotentialParams {
    double a = 1.0;

    explicit PotentialParams(double a_ = 1.0);
};

double W(double r, const PotentialParams& p);   // a (r^2-1)^2 / 4
double W1(double r, const PotentialParams& p);  // a (r^3 - r)
double W2(double r, const PotentialParams& p);  // a (3 r^2 - 1)
double W3(double r, const PotentialParams& p);  // 6 a r

/// Area functional F[w] = dirichlet_energy(w) + integrate(W(w)).
double area_F(const Field& w, const PotentialParams& p);

/// mu = -laplacian(w) + W'(w); the exact discrete gradient of F.
Field chemical_potential(const Field& w, const PotentialParams& p);

/// Free energy E[w] = ||mu||_2^2 / 2.
double energy_E(const Field& w, const PotentialParams& p);

/// Exact discrete gradient of E: -laplacian(mu) + W''(w) mu.
Field grad_E(const Field& w, const PotentialParams& p);
Field grad_E(const Field& w, const Field& mu, const PotentialParams& p);

/**
 * Immutable snapshot of a field together with the derived quantities the
 * flow machinery keeps asking for: mu, E, F, mean, and the degeneracy
 * margin ||mu - mean(mu)||_2.
 */
struct PhaseState {
    Field v;
    Field mu;
    double energy = 0.0;  // E[v]
    double area = 0.0;    // F[v]
    double mean_v = 0.0;
    double margin = 0.0;  // ||mu - mean(mu)||_2
};

PhaseState make_state(const Field& v, const PotentialParams& p);

}  // namespace wpflow
