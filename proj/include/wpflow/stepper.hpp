#pragma once

#include "wpflow/constraints.hpp"
#include "wpflow/functionals.hpp"
#include "wpflow/neumann.hpp"

namespace wpflow {

struct StepConfig {
    double tau = 1e-3;        // time step, must lie in (0, 1)
    double tol_el = 1e-8;     // Euler-Lagrange residual tolerance, ||r|| / (1 + ||g||)
    int max_inner = 5000;     // inner iteration cap
    double armijo_shrink = 0.5;
    double armijo_slope = 1e-4;
    double sigma0 = 1.0;      // initial line-search step

    StepConfig() = default;
    explicit StepConfig(double tau_);
    void validate() const;
};

enum class StepStatus { Converged, MaxInnerExceeded, LineSearchStall };

struct StepReport {
    StepStatus status = StepStatus::Converged;
    double A = 0.0;  // volume multiplier
    double B = 0.0;  // area multiplier
    double el_residual = 0.0;
    double mean_residual = 0.0;   // |mean(v) - alpha|
    double area_residual = 0.0;   // |F[v] - beta| / beta
    int inner_iters = 0;
    double objective = 0.0;       // final ||v - f||^2/2 + tau E[v]
    bool decrease_ok = false;     // ||v-f||^2/(2 tau) + E[v] <= E[f] + slack
    double a1_residual = 0.0;
    double a2_residual = 0.0;

    bool ok() const { return status == StepStatus::Converged; }
};

struct StepResult {
    PhaseState state;
    StepReport report;
};

struct TangentialGradient {
    Field r;       // g - A - B mu, orthogonal to both span directions
    double A = 0.0;
    double B = 0.0;
    double g_norm = 0.0;
};

/**
 * Full gradient g = (u - f)/tau + grad_E(u) of the proximal objective
 * (scaled by 1/tau), split against the multiplier directions {1, mu}:
 * B = <g, mu - mean(mu)> / ||mu - mean(mu)||^2, A = mean(g) - B mean(mu).
 * Throws DegenerateDirectionError when the margin falls below 1e-10.
 */
TangentialGradient tangential_gradient(const Field& u, const Field& f, const StepConfig& cfg,
                                       const PotentialParams& p);

struct MultiplierIdentityResiduals {
    double a1 = 0.0;
    double a2 = 0.0;
};

/**
 * Residuals of the two multiplier identities, each scaled by
 * (1 + |lhs| + |rhs|):
 *   (a1)  A + B mean(mu) = mean(W''(v) mu)         [exact up to EL residual]
 *   (a2)  B ||mu - mean(mu)||^2 = ||grad mu||^2 + int W''(v) mu^2
 *                                   - mean(W''(v) mu) int mu   [O(tau)]
 */
MultiplierIdentityResiduals verify_multiplier_identities(const PhaseState& v, const Field& f,
                                                         double A, double B,
                                                         const StepConfig& cfg,
                                                         const PotentialParams& p);

/**
 * One proximal step: minimize ||w - f||^2/2 + tau E[w] over the constraint
 * manifold by projected descent with Armijo backtracking on retracted trial
 * points. The returned report carries the multipliers read off the final
 * gradient decomposition and the residuals of the per-step identities.
 *
 * Throws DegenerateDirectionError on margin collapse at the current iterate;
 * cap and stall outcomes come back as report.status with the last iterate.
 */
StepResult proximal_step(const PhaseState& f_state, const ConstraintSpec& spec,
                         const StepConfig& cfg, const PotentialParams& p,
                         const NeumannSolvePlan& plan);

}  // namespace wpflow
