#include "wpflow/flow.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "wpflow/errors.hpp"

namespace wpflow {

namespace {

Field mu_deviation(const Field& mu) {
    Field d = mu;
    double m = mean(mu);
    for (double& x : d.values) x -= m;
    return d;
}

int step_count(double t_end, double tau) {
    if (t_end <= 0.0) return 0;
    return static_cast<int>(std::ceil(t_end / tau - 1e-9));
}

DiagnosticsRow make_row(int step, double tau, const PhaseState& s, const StepReport& r) {
    DiagnosticsRow row;
    row.step = step;
    row.t = step * tau;
    row.E = s.energy;
    row.F = s.area;
    row.mean = s.mean_v;
    row.A = r.A;
    row.B = r.B;
    row.margin = s.margin;
    row.el_residual = r.el_residual;
    row.a1_residual = r.a1_residual;
    row.a2_residual = r.a2_residual;
    row.inner_iters = r.inner_iters;
    return row;
}

const char* status_name(StepStatus s) {
    switch (s) {
        case StepStatus::Converged: return "converged";
        case StepStatus::MaxInnerExceeded: return "inner iteration cap exceeded";
        case StepStatus::LineSearchStall: return "line search stalled";
    }
    return "unknown";
}

}  // namespace

void RunConfig::validate() const {
    step_cfg.validate();
    if (!(tau > 0.0) || !(tau < 1.0)) throw std::invalid_argument("tau must lie in (0, 1)");
    if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be nonnegative");
    if (t_end / tau > 1e7) throw std::invalid_argument("t_end / tau exceeds the 1e7 sanity cap");
    if (!(margin_floor > 0.0)) throw std::invalid_argument("margin_floor must be positive");
    if (snapshot_every < 1) throw std::invalid_argument("snapshot_every must be at least 1");
}

Trajectory evolve(const Field& v0, const RunConfig& cfg) {
    cfg.validate();
    if (!(v0.grid == cfg.grid)) throw std::invalid_argument("v0 lives on a different grid");
    const PotentialParams& p = cfg.potential;
    const ConstraintSpec& spec = cfg.spec;
    NeumannSolvePlan plan(cfg.grid);

    Trajectory traj;
    PhaseState cur = make_state(v0, p);
    if (std::abs(cur.mean_v - spec.alpha) > spec.tol_mean)
        throw InfeasibleInitialError("initial mean violates the volume constraint");
    if (std::abs(cur.area - spec.beta) > spec.tol_area * spec.beta)
        throw InfeasibleInitialError("initial area violates the area constraint");

    const double E0 = cur.energy;
    double m_M = plan.dual_norm_sq(mu_deviation(cur.mu));
    double c1 = std::max(std::sqrt(h2_norm_sq(cur.v)), std::sqrt(2.0 * cur.energy)) /
                (1.0 + std::sqrt(E0));

    traj.times.push_back(0.0);
    traj.states.push_back(cur);

    if (cur.margin < cfg.margin_floor) {
        traj.status = RunStatus::MarginCollapse;
        traj.failure_step = 0;
        traj.message = "initial margin below the configured floor";
        traj.observed_m_M = m_M;
        traj.c1_fit = c1;
        return traj;
    }

    StepConfig step_cfg = cfg.step_cfg;
    step_cfg.tau = cfg.tau;
    const int n_steps = step_count(cfg.t_end, cfg.tau);

    for (int n = 1; n <= n_steps; ++n) {
        StepResult res;
        try {
            res = proximal_step(cur, spec, step_cfg, p, plan);
            if (!res.report.ok()) {
                // One retry with two half steps keeps the time grid intact.
                StepConfig half = step_cfg;
                half.tau = 0.5 * step_cfg.tau;
                StepResult first = proximal_step(cur, spec, half, p, plan);
                if (first.report.ok()) {
                    StepResult second = proximal_step(first.state, spec, half, p, plan);
                    if (second.report.ok()) {
                        second.report.inner_iters += first.report.inner_iters;
                        second.report.decrease_ok =
                            first.report.decrease_ok && second.report.decrease_ok;
                        res = std::move(second);
                        traj.message = "step " + std::to_string(n) + " used two half steps";
                    }
                }
            }
        } catch (const DegenerateDirectionError& e) {
            traj.status = RunStatus::MarginCollapse;
            traj.failure_step = n;
            traj.message = e.what();
            break;
        } catch (const SolverError& e) {
            traj.status = RunStatus::StepFailure;
            traj.failure_step = n;
            traj.message = e.what();
            break;
        }
        if (!res.report.ok()) {
            traj.status = RunStatus::StepFailure;
            traj.failure_step = n;
            traj.message = std::string("step failed: ") + status_name(res.report.status);
            break;
        }

        Field diff = res.state.v - cur.v;
        double step_norm = norm_l2(diff);
        double mu_bar = mean(res.state.mu);

        traj.kappa_fit = std::max(traj.kappa_fit,
                                  std::abs(res.report.B) / (1.0 + step_norm / cfg.tau));
        traj.kappa_amu_fit =
            std::max(traj.kappa_amu_fit, std::abs(res.report.A + res.report.B * mu_bar));
        traj.d35_sum += cfg.tau * (res.report.A * res.report.A + res.report.B * res.report.B +
                                   h2_norm_sq(res.state.mu));
        m_M = std::min(m_M, plan.dual_norm_sq(mu_deviation(res.state.mu)));
        c1 = std::max(c1, std::max(std::sqrt(h2_norm_sq(res.state.v)),
                                   std::sqrt(2.0 * res.state.energy)) /
                              (1.0 + std::sqrt(E0)));

        cur = res.state;
        traj.times.push_back(n * cfg.tau);
        traj.states.push_back(cur);
        traj.reports.push_back(res.report);
        traj.rows.push_back(make_row(n, cfg.tau, cur, res.report));

        if (cur.margin < cfg.margin_floor) {
            traj.status = RunStatus::MarginCollapse;
            traj.failure_step = n;
            traj.message = "margin fell below the configured floor";
            break;
        }
    }

    traj.observed_m_M = m_M;
    traj.c1_fit = c1;

    // Worst Hoelder ratio over recorded pairs; subsample long runs.
    const std::size_t count = traj.states.size();
    if (count >= 2 && E0 > 0.0) {
        std::size_t stride = std::max<std::size_t>(1, count / 200);
        for (std::size_t i = 0; i < count; i += stride) {
            for (std::size_t j = i + stride; j < count; j += stride) {
                Field d = traj.states[j].v - traj.states[i].v;
                double num = inner(d, d);
                double den = 2.0 * E0 * (cfg.tau + traj.times[j] - traj.times[i]);
                traj.holder_worst_ratio = std::max(traj.holder_worst_ratio, num / den);
            }
        }
    }
    return traj;
}

bool EstimateReport::all_pass() const {
    for (const EstimateCheck& c : checks)
        if (!c.pass) return false;
    return true;
}

EstimateReport check_estimates(const Trajectory& traj, const RunConfig& cfg) {
    EstimateReport rep;
    if (traj.states.empty()) return rep;
    const double E0 = traj.states.front().energy;

    {
        EstimateCheck c;
        c.name = "energy-monotone";
        double worst = 0.0;
        for (std::size_t n = 1; n < traj.states.size(); ++n)
            worst = std::max(worst, traj.states[n].energy - traj.states[n - 1].energy);
        c.worst_ratio = worst / 1e-10;
        c.pass = worst <= 1e-10;
        std::ostringstream os;
        os << "max energy increase " << worst;
        c.detail = os.str();
        rep.checks.push_back(c);
    }
    {
        EstimateCheck c;
        c.name = "uniform-bounds";
        double c1 = 0.0;
        for (const PhaseState& s : traj.states)
            c1 = std::max(c1, std::max(std::sqrt(h2_norm_sq(s.v)), std::sqrt(2.0 * s.energy)) /
                                  (1.0 + std::sqrt(E0)));
        c.worst_ratio = c1;
        c.pass = std::isfinite(c1);
        std::ostringstream os;
        os << "fitted C1 = " << c1;
        c.detail = os.str();
        rep.checks.push_back(c);
    }
    {
        EstimateCheck c;
        c.name = "step-sum";
        double sum = 0.0;
        for (std::size_t n = 1; n < traj.states.size(); ++n) {
            Field d = traj.states[n].v - traj.states[n - 1].v;
            sum += inner(d, d);
        }
        double bound = 2.0 * cfg.tau * E0;
        c.worst_ratio = bound > 0.0 ? sum / bound : (sum > 0.0 ? 1e300 : 0.0);
        c.pass = sum <= bound * (1.0 + 1e-8) + 1e-300;
        std::ostringstream os;
        os << "sum " << sum << " vs bound " << bound;
        c.detail = os.str();
        rep.checks.push_back(c);
    }
    {
        EstimateCheck c;
        c.name = "hoelder-in-time";
        double worst = 0.0;
        if (E0 > 0.0) {
            std::size_t count = traj.states.size();
            std::size_t stride = std::max<std::size_t>(1, count / 200);
            for (std::size_t i = 0; i < count; i += stride) {
                for (std::size_t j = i + stride; j < count; j += stride) {
                    Field d = traj.states[j].v - traj.states[i].v;
                    worst = std::max(worst, inner(d, d) /
                                                (2.0 * E0 *
                                                 (cfg.tau + traj.times[j] - traj.times[i])));
                }
            }
        }
        c.worst_ratio = worst;
        c.pass = worst <= 1.0 + 1e-8;
        std::ostringstream os;
        os << "worst pair ratio " << worst;
        c.detail = os.str();
        rep.checks.push_back(c);
    }
    {
        EstimateCheck c;
        c.name = "multiplier-integral";
        c.worst_ratio = traj.d35_sum;
        c.pass = std::isfinite(traj.d35_sum);
        std::ostringstream os;
        os << "accumulated " << traj.d35_sum;
        c.detail = os.str();
        rep.checks.push_back(c);
    }
    {
        EstimateCheck c;
        c.name = "constraint-transport";
        double worst = 0.0;
        for (const PhaseState& s : traj.states) {
            worst = std::max(worst, std::abs(s.mean_v - cfg.spec.alpha) / cfg.spec.tol_mean);
            if (cfg.spec.beta > 0.0)
                worst = std::max(worst, std::abs(s.area - cfg.spec.beta) /
                                            (cfg.spec.beta * cfg.spec.tol_area));
        }
        c.worst_ratio = worst;
        c.pass = worst <= 1.0;
        std::ostringstream os;
        os << "worst normalized constraint drift " << worst;
        c.detail = os.str();
        rep.checks.push_back(c);
    }
    return rep;
}

DependenceReport continuous_dependence_harness(const Field& v0, const Field& delta,
                                               const RunConfig& cfg, double ratio_cap) {
    DependenceReport rep;
    rep.cap = ratio_cap;

    Field perturbed = v0 + delta;
    Field v0b = retract_to_manifold(perturbed, cfg.spec, cfg.potential);
    Field d0 = v0b - v0;
    double denom = inner(d0, d0);
    double floor = 1e-13 * (1.0 + norm_l2(v0));
    if (denom <= floor * floor) {  // perturbation vanished up to roundoff
        rep.coincident = true;
        rep.ok = true;
        return rep;
    }

    Trajectory a = evolve(v0, cfg);
    Trajectory b = evolve(v0b, cfg);
    rep.status_a = a.status;
    rep.status_b = b.status;

    std::size_t n = std::min(a.states.size(), b.states.size());
    double mu_sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) {
            Field dmu = a.states[k].mu - b.states[k].mu;
            mu_sum += cfg.tau * inner(dmu, dmu);
        }
        Field dv = a.states[k].v - b.states[k].v;
        double r = (inner(dv, dv) + 0.5 * mu_sum) / denom;
        rep.times.push_back(a.times[k]);
        rep.ratios.push_back(r);
        rep.max_ratio = std::max(rep.max_ratio, r);
    }
    rep.ok = a.ok() && b.ok() && std::isfinite(rep.max_ratio) && rep.max_ratio <= ratio_cap;
    return rep;
}

}  // namespace wpflow
