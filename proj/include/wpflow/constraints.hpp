#pragma once

#include <vector>

#include "wpflow/functionals.hpp"
#include "wpflow/grid.hpp"
#include "wpflow/neumann.hpp"

namespace wpflow {

/// The constraint pair: prescribed mean alpha and area level beta.
struct ConstraintSpec {
    double alpha = 0.0;
    double beta = 0.0;
    double tol_mean = 1e-12;  // absolute
    double tol_area = 1e-10;  // relative to beta

    ConstraintSpec(double alpha_, double beta_, double tol_mean_ = 1e-12,
                   double tol_area_ = 1e-10);
};

struct FeasibilityReport {
    double beta_alpha_est = 0.0;
    bool z_empty_sufficient = false;
    double margin_lower_bound_est = 0.0;  // observed m_M over sampled states
};

/// Result of the multi-seed area minimization under a mean constraint.
struct AreaMinimum {
    Field minimizer;
    double value = 0.0;      // F at the minimizer
    int converged_seeds = 0;
};

/**
 * Upper-bound estimate of beta_alpha = inf { F[w] : mean(w) = alpha } by
 * mean-projected gradient descent from several seeds (constant, cosine
 * modes, sign-split profile). Throws NoConvergenceError if no seed drives
 * ||mu - mean(mu)||_2 below 1e-8 within the iteration cap.
 */
AreaMinimum minimize_area(double alpha, const PotentialParams& p, const Grid& grid);
double beta_alpha_estimate(double alpha, const PotentialParams& p, const Grid& grid);

/**
 * Feasible-point construction: from a minimizer w_alpha and a nonzero
 * mean-zero direction phi, bisection on lambda -> F[w_alpha + lambda phi]
 * produces w with mean(w) = alpha and |F[w] - beta| <= tol_area * beta.
 */
Field construct_feasible(const ConstraintSpec& spec, const Field& phi, const PotentialParams& p,
                         const Grid& grid);

/**
 * Restore both constraints on a point near the manifold: exact constant
 * shift for the mean, scalar Newton along d = mu - mean(mu) for the area
 * (the F-derivative along d is ||mu - mean(mu)||_2^2, so the Newton step
 * is well conditioned exactly when the degeneracy margin is positive).
 */
Field retract_to_manifold(const Field& w, const ConstraintSpec& spec, const PotentialParams& p);

/// Closed-form sufficient test for emptiness of the degenerate set:
/// 2 beta + (a |Omega| / 2) (2 alpha^2 - 1 - 27 alpha^4 / 16) > 0.
bool z_empty_sufficient(const ConstraintSpec& spec, const PotentialParams& p, const Grid& grid);

/// min over states of dual_norm_sq(mu - mean(mu)); the run's observed m_M.
double m_M_probe(const std::vector<PhaseState>& states, const NeumannSolvePlan& plan);

}  // namespace wpflow
