#pragma once

#include <string>
#include <vector>

#include "wpflow/constraints.hpp"
#include "wpflow/stepper.hpp"

namespace wpflow {

struct RunConfig {
    ConstraintSpec spec{0.0, 0.5};
    PotentialParams potential{1.0};
    Grid grid;
    double tau = 1e-3;
    double t_end = 0.1;
    StepConfig step_cfg;
    double margin_floor = 1e-8;  // run aborts if any state's margin drops below
    int snapshot_every = 10;

    void validate() const;
};

enum class RunStatus { Ok, MarginCollapse, StepFailure };

struct DiagnosticsRow {
    int step = 0;
    double t = 0.0;
    double E = 0.0;
    double F = 0.0;
    double mean = 0.0;
    double A = 0.0;
    double B = 0.0;
    double margin = 0.0;
    double el_residual = 0.0;
    double a1_residual = 0.0;
    double a2_residual = 0.0;
    int inner_iters = 0;
};

struct Trajectory {
    RunStatus status = RunStatus::Ok;
    int failure_step = -1;     // step index at which the run stopped early
    std::string message;
    std::vector<double> times;       // n tau, starting at 0
    std::vector<PhaseState> states;  // one per time
    std::vector<StepReport> reports; // one per step
    std::vector<DiagnosticsRow> rows;

    // Global diagnostics.
    double observed_m_M = 0.0;       // min dual_norm_sq(mu - mean mu)
    double kappa_fit = 0.0;          // max |B| / (1 + ||v-f||/tau)
    double kappa_amu_fit = 0.0;      // max |A + B mean(mu)|
    double c1_fit = 0.0;             // max(||v||_H2, ||mu||_2) / (1 + sqrt(E[v0]))
    double holder_worst_ratio = 0.0; // worst ||v(t2)-v(t1)||^2 / (2 E[v0] (tau + t2 - t1))
    double d35_sum = 0.0;            // sum tau (A^2 + B^2 + ||mu||_H2^2)

    bool ok() const { return status == RunStatus::Ok; }
};

/**
 * Run the minimizing-movement scheme from a feasible v0 for
 * ceil(t_end / tau) steps. Margin collapse or a failed step terminates the
 * run early with the partial trajectory and a non-Ok status; an infeasible
 * v0 throws InfeasibleInitialError.
 */
Trajectory evolve(const Field& v0, const RunConfig& cfg);

struct EstimateCheck {
    std::string name;
    bool pass = false;
    double worst_ratio = 0.0;
    std::string detail;
};

struct EstimateReport {
    std::vector<EstimateCheck> checks;
    bool all_pass() const;
};

/**
 * Verify the a-priori estimates on a recorded trajectory: energy
 * monotonicity, uniform H2 / L2 bounds, the telescoped step-sum bound,
 * the Hoelder-in-time bound, and finiteness of the multiplier integral.
 */
EstimateReport check_estimates(const Trajectory& traj, const RunConfig& cfg);

struct DependenceReport {
    bool coincident = false;   // perturbation vanished after retraction
    std::vector<double> times;
    std::vector<double> ratios;  // R(t) per step
    double max_ratio = 0.0;
    double cap = 1e6;
    bool ok = false;             // both runs completed and max_ratio <= cap
    RunStatus status_a = RunStatus::Ok;
    RunStatus status_b = RunStatus::Ok;
};

/**
 * Two-trajectory stability probe: evolve v0 and retract(v0 + delta), then
 * report R(t) = (||v1 - v2||^2(t) + 1/2 sum tau ||mu1 - mu2||^2) / ||v1(0) - v2(0)||^2.
 */
DependenceReport continuous_dependence_harness(const Field& v0, const Field& delta,
                                               const RunConfig& cfg, double ratio_cap = 1e6);

}  // namespace wpflow
