#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "wpflow/errors.hpp"
#include "wpflow/run_io.hpp"

namespace wpflow {

namespace {

namespace fs = std::filesystem;

Field random_smooth_field(const Grid& grid, std::mt19937& rng, double offset, double amp) {
    using std::numbers::pi;
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    const int modes = 4;
    std::vector<double> cx(modes + 1), cy(modes + 1);
    for (double& c : cx) c = coef(rng);
    for (double& c : cy) c = coef(rng);
    return Field::from_function(grid, [&](double x, double y) {
        double v = offset;
        for (int k = 1; k <= modes; ++k) {
            v += amp * cx[k] * std::cos(k * pi * x / grid.Lx) / k;
            if (grid.dim == 2) v += amp * cy[k] * std::cos(k * pi * y / grid.Ly) / k;
        }
        return v;
    });
}

double central_difference(const std::function<double(double)>& f, double eps) {
    return (f(eps) - f(-eps)) / (2.0 * eps);
}

struct CheckLine {
    std::string name;
    bool pass = false;
    double worst = 0.0;
    std::string note;
};

void print_check(std::ostream& out, const CheckLine& c) {
    out << (c.pass ? "PASS" : "FAIL") << "  " << c.name << "  (worst ratio " << c.worst << ")";
    if (!c.note.empty()) out << "  " << c.note;
    out << "\n";
}

// Reference minimization for the tiny-grid proximal problem: random restarts
// around f followed by plain tangential descent with the shared retraction.
double brute_force_proximal_objective(const PhaseState& f_state, const ConstraintSpec& spec,
                                      double tau, const PotentialParams& p, int restarts,
                                      unsigned seed) {
    const Field& f = f_state.v;
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    // Any competitive minimizer sits inside the ball ||w - f|| <= sqrt(2 tau E[f]).
    const double radius = std::sqrt(std::max(2.0 * tau * f_state.energy, 1e-30));

    auto objective = [&](const Field& w) {
        Field d = w - f;
        return 0.5 * inner(d, d) + tau * energy_E(w, p);
    };

    double best = objective(f);
    for (int trial = 0; trial < restarts; ++trial) {
        Field w = f;
        if (trial > 0) {
            Field z(f.grid);
            for (double& x : z.values) x = gauss(rng);
            double zn = norm_l2(z);
            if (zn == 0.0) continue;
            double scale = radius * (0.05 + 1.95 * unif(rng)) / zn;
            axpy(w, scale, z);
            try {
                w = retract_to_manifold(w, spec, p);
            } catch (const SolverError&) {
                continue;
            }
        }
        double obj = objective(w);
        for (int it = 0; it < 4000; ++it) {
            Field mu = chemical_potential(w, p);
            double mu_bar = mean(mu);
            Field dev = mu;
            for (double& x : dev.values) x -= mu_bar;
            double m2 = inner(dev, dev);
            if (m2 < 1e-20) break;
            Field g = grad_E(w, mu, p);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] = (w[i] - f[i]) + tau * g[i];
            double B = inner(g, dev) / m2;
            double A = mean(g) - B * mu_bar;
            Field r = g;
            for (std::size_t i = 0; i < r.size(); ++i) r[i] -= A + B * mu[i];
            double rn2 = inner(r, r);
            if (std::sqrt(rn2) <= 1e-9 * (1.0 + norm_l2(g))) break;
            double sigma = 1.0;
            bool moved = false;
            while (sigma >= 1e-14) {
                Field t = w;
                axpy(t, -sigma, r);
                try {
                    t = retract_to_manifold(t, spec, p);
                } catch (const SolverError&) {
                    sigma *= 0.5;
                    continue;
                }
                double ot = objective(t);
                if (ot <= obj - 1e-4 * sigma * rn2) {
                    w = std::move(t);
                    obj = ot;
                    moved = true;
                    break;
                }
                sigma *= 0.5;
            }
            if (!moved) break;
        }
        best = std::min(best, obj);
    }
    return best;
}

int classify_error(const std::exception& e, std::ostream& err) {
    err << "error: " << e.what() << "\n";
    if (dynamic_cast<const InfeasibleBetaError*>(&e) ||
        dynamic_cast<const InfeasibleInitialError*>(&e))
        return kExitInfeasible;
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const std::invalid_argument*>(&e))
        return kExitConfig;
    return kExitNumerical;
}

struct InitOutcome {
    Field v0;
    FeasibilityReport report;
};

InitOutcome run_init(const CliConfig& cfg, const std::string& out_dir, std::ostream& out) {
    Grid grid = cfg.make_grid();
    PotentialParams p = cfg.make_potential();
    ConstraintSpec spec = cfg.make_spec();

    AreaMinimum am = minimize_area(cfg.alpha, p, grid);
    FeasibilityReport report;
    report.beta_alpha_est = am.value;
    report.z_empty_sufficient = z_empty_sufficient(spec, p, grid);

    if (!(cfg.beta > am.value))
        throw InfeasibleBetaError("beta=" + std::to_string(cfg.beta) +
                                  " does not exceed the estimated minimal area " +
                                  std::to_string(am.value));

    Field phi = make_phi(cfg.phi, grid);
    Field v0 = construct_feasible(spec, phi, p, grid);
    PhaseState s0 = make_state(v0, p);
    NeumannSolvePlan plan(grid);
    report.margin_lower_bound_est = m_M_probe({s0}, plan);

    fs::create_directories(out_dir);
    write_snapshot(out_dir + "/v0.snap", Snapshot{v0, cfg.a, cfg.alpha, cfg.beta, 0.0});

    std::ostringstream sum;
    sum << "beta_alpha_estimate " << report.beta_alpha_est << "\n"
        << "converged_seeds " << am.converged_seeds << "\n"
        << "z_empty_sufficient " << (report.z_empty_sufficient ? "true" : "false") << "\n"
        << "initial_E " << s0.energy << "\n"
        << "initial_F " << s0.area << "\n"
        << "initial_mean " << s0.mean_v << "\n"
        << "initial_margin " << s0.margin << "\n"
        << "observed_m_M " << report.margin_lower_bound_est << "\n";
    if (!report.z_empty_sufficient)
        sum << "warning: degeneracy-set emptiness test inconclusive for (alpha, beta)\n";
    std::ofstream sf(out_dir + "/feasibility.txt");
    sf << sum.str();
    out << sum.str();
    return InitOutcome{std::move(v0), report};
}

}  // namespace

int cmd_init(const std::string& config_path, std::ostream& out, std::ostream& err) {
    try {
        CliConfig cfg = parse_config(config_path);
        std::string out_dir = resolve_out_dir(cfg);
        run_init(cfg, out_dir, out);
        return kExitOk;
    } catch (const std::exception& e) {
        return classify_error(e, err);
    }
}

int cmd_run(const std::string& config_path, std::ostream& out, std::ostream& err) {
    try {
        CliConfig cfg = parse_config(config_path);
        std::string out_dir = resolve_out_dir(cfg);
        RunConfig rc = cfg.make_run_config();

        Field v0;
        std::string snap_path = out_dir + "/v0.snap";
        if (fs::exists(snap_path)) {
            Snapshot snap = read_snapshot(snap_path);
            if (!(snap.field.grid == rc.grid))
                throw ConfigError(0, "snapshot grid does not match the configured grid");
            if (snap.a != cfg.a || snap.alpha != cfg.alpha || snap.beta != cfg.beta)
                throw ConfigError(0, "snapshot parameters do not match the configuration");
            v0 = std::move(snap.field);
        } else {
            v0 = run_init(cfg, out_dir, out).v0;
        }

        Trajectory traj = evolve(v0, rc);

        fs::create_directories(out_dir);
        write_diagnostics_csv(out_dir + "/diagnostics.csv", traj);
        for (std::size_t n = 0; n < traj.states.size(); ++n) {
            if (n % static_cast<std::size_t>(rc.snapshot_every) != 0 && n + 1 != traj.states.size())
                continue;
            char name[64];
            std::snprintf(name, sizeof(name), "/snap_%06zu.snap", n);
            write_snapshot(out_dir + name,
                           Snapshot{traj.states[n].v, cfg.a, cfg.alpha, cfg.beta, traj.times[n]});
        }

        EstimateReport est = check_estimates(traj, rc);
        double min_margin = traj.states.empty() ? 0.0 : traj.states.front().margin;
        double max_A = 0.0, max_B = 0.0;
        for (const PhaseState& s : traj.states) min_margin = std::min(min_margin, s.margin);
        for (const StepReport& r : traj.reports) {
            max_A = std::max(max_A, std::abs(r.A));
            max_B = std::max(max_B, std::abs(r.B));
        }

        std::ostringstream sum;
        sum << "status "
            << (traj.status == RunStatus::Ok
                    ? "ok"
                    : traj.status == RunStatus::MarginCollapse ? "margin-collapse" : "step-failure")
            << "\n";
        if (!traj.message.empty()) sum << "note " << traj.message << "\n";
        sum << "steps " << traj.reports.size() << "\n"
            << "observed_m_M " << traj.observed_m_M << "\n"
            << "min_margin " << min_margin << "\n"
            << "max_abs_A " << max_A << "\n"
            << "max_abs_B " << max_B << "\n"
            << "kappa_fit " << traj.kappa_fit << "\n"
            << "c1_fit " << traj.c1_fit << "\n"
            << "d35_accumulator " << traj.d35_sum << "\n";
        for (const EstimateCheck& c : est.checks)
            sum << "estimate " << c.name << " " << (c.pass ? "pass" : "FAIL") << " worst_ratio "
                << c.worst_ratio << "\n";
        std::ofstream sf(out_dir + "/summary.txt");
        sf << sum.str();
        out << sum.str();

        if (traj.status == RunStatus::MarginCollapse) return kExitMarginCollapse;
        if (traj.status == RunStatus::StepFailure) return kExitNumerical;
        return kExitOk;
    } catch (const std::exception& e) {
        return classify_error(e, err);
    }
}

int cmd_check(const std::string& config_path, bool tamper, std::ostream& out, std::ostream& err) {
    try {
        CliConfig cfg = parse_config(config_path);
        Grid grid = cfg.make_grid();
        PotentialParams p = cfg.make_potential();
        std::mt19937 rng(static_cast<unsigned>(cfg.seed) + 12345u);
        std::vector<CheckLine> lines;

        {  // directional derivatives of F and E against the analytic gradients
            CheckLine cF{"gradient-F-fd"}, cE{"gradient-E-fd"};
            double worstF = 0.0, worstE = 0.0;
            for (int k = 0; k < 4; ++k) {
                Field w = random_smooth_field(grid, rng, 0.3, 0.5);
                Field d = random_smooth_field(grid, rng, 0.2, 1.0);
                double dn = norm_l2(d);
                for (double& x : d.values) x /= dn;
                auto F_along = [&](double t) {
                    Field u = w;
                    axpy(u, t, d);
                    return area_F(u, p);
                };
                auto E_along = [&](double t) {
                    Field u = w;
                    axpy(u, t, d);
                    return energy_E(u, p);
                };
                double exactF = inner(chemical_potential(w, p), d);
                double exactE = inner(grad_E(w, p), d);
                worstF = std::max(worstF, std::abs(central_difference(F_along, 1e-5) - exactF) /
                                              (1.0 + std::abs(exactF)));
                worstE = std::max(worstE, std::abs(central_difference(E_along, 1e-5) - exactE) /
                                              (1.0 + std::abs(exactE)));
            }
            cF.worst = worstF / 1e-6;
            cF.pass = worstF <= 1e-6;
            cE.worst = worstE / 1e-6;
            cE.pass = worstE <= 1e-6;
            lines.push_back(cF);
            lines.push_back(cE);
        }

        NeumannSolvePlan plan(grid);
        {  // eigenfunction inversion
            CheckLine c{"neumann-eigenfunction"};
            Field w = Field::from_function(grid, [&](double x, double) {
                return std::cos(std::numbers::pi * x / grid.Lx);
            });
            double lambda = plan.eigenvalue(0, 1);
            Field u = plan.solve(w);
            double worst = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i)
                worst = std::max(worst, std::abs(u[i] - w[i] / lambda));
            c.worst = worst / 1e-12;
            c.pass = worst <= 1e-12;
            lines.push_back(c);
        }
        {  // -laplacian(solve(w)) = w and self-adjointness on random data
            CheckLine ci{"neumann-inverse"}, cs{"neumann-selfadjoint"};
            double worst_inv = 0.0, worst_sym = 0.0;
            for (int k = 0; k < 8; ++k) {
                Field u = random_smooth_field(grid, rng, 0.0, 1.0);
                Field v = random_smooth_field(grid, rng, 0.0, 1.0);
                double mu_ = mean(u), mv = mean(v);
                for (double& x : u.values) x -= mu_;
                for (double& x : v.values) x -= mv;
                Field Nu = plan.solve(u);
                Field res = laplacian(Nu);
                for (std::size_t i = 0; i < res.size(); ++i) res[i] += u[i];
                worst_inv = std::max(worst_inv, norm_l2(res) / (1.0 + norm_l2(u)));
                double s1 = inner(Nu, v), s2 = inner(u, plan.solve(v));
                worst_sym = std::max(worst_sym, std::abs(s1 - s2) / (1.0 + std::abs(s1)));
            }
            ci.worst = worst_inv / 1e-11;
            ci.pass = worst_inv <= 1e-11;
            cs.worst = worst_sym / 1e-11;
            cs.pass = worst_sym <= 1e-11;
            lines.push_back(ci);
            lines.push_back(cs);
        }

        {  // tiny-grid reference comparison
            CheckLine c{"tiny-grid-oracle"};
            Grid tiny = Grid::make_1d(1.0, 8);
            PotentialParams tp(1.0);
            ConstraintSpec tspec(0.0, 0.5);
            Field phi = make_phi("cos1", tiny);
            Field v0 = construct_feasible(tspec, phi, tp, tiny);
            Field noise = random_smooth_field(tiny, rng, 0.0, 0.05);
            double nm = mean(noise);
            for (double& x : noise.values) x -= nm;
            Field f = v0;
            axpy(f, 1.0, noise);
            f = retract_to_manifold(f, tspec, tp);
            PhaseState fs_ = make_state(f, tp);
            StepConfig scfg(0.01);
            NeumannSolvePlan tplan(tiny);
            StepResult res = proximal_step(fs_, tspec, scfg, tp, tplan);
            double ref = brute_force_proximal_objective(fs_, tspec, 0.01, tp, 60,
                                                        static_cast<unsigned>(cfg.seed) + 7u);
            double rel = std::abs(res.report.objective - ref) /
                         std::max(std::abs(res.report.objective), 1e-300);
            c.worst = rel / 1e-6;
            c.pass = res.report.ok() && rel <= 1e-6;
            lines.push_back(c);
        }

        {  // short evolution plus the estimate suite
            CheckLine ce{"evolve-estimates"}, ca{"multiplier-identity-a1"};
            RunConfig rc = cfg.make_run_config();
            rc.t_end = std::min(cfg.t_end, 20.0 * cfg.tau);
            ConstraintSpec spec = cfg.make_spec();
            AreaMinimum am = minimize_area(cfg.alpha, p, grid);
            if (!(cfg.beta > am.value))
                throw InfeasibleBetaError("beta does not exceed the estimated minimal area");
            Field v0 = construct_feasible(spec, make_phi(cfg.phi, grid), p, grid);
            Trajectory traj = evolve(v0, rc);
            if (tamper && traj.states.size() > 2)
                traj.states[traj.states.size() / 2].energy =
                    traj.states.front().energy + 1.0;  // negative control: break monotonicity
            EstimateReport est = check_estimates(traj, rc);
            double worst = 0.0;
            for (const EstimateCheck& k : est.checks)
                if (!k.pass) worst = std::max(worst, k.worst_ratio);
            ce.worst = worst;
            ce.pass = traj.ok() && est.all_pass();
            lines.push_back(ce);

            double worst_a1 = 0.0;
            for (std::size_t n = 0; n < traj.reports.size(); ++n) {
                const StepReport& r = traj.reports[n];
                const PhaseState& s = traj.states[n + 1];
                Field w2mu(s.v.grid);
                for (std::size_t i = 0; i < s.v.size(); ++i) w2mu[i] = W2(s.v[i], p) * s.mu[i];
                double raw = std::abs(r.A + r.B * mean(s.mu) - mean(w2mu));
                double bound = 10.0 * std::max(r.el_residual, rc.step_cfg.tol_el) *
                               (1.0 + std::abs(r.A) + std::abs(r.B));
                worst_a1 = std::max(worst_a1, raw / bound);
            }
            ca.worst = worst_a1;
            ca.pass = worst_a1 <= 1.0;
            lines.push_back(ca);
        }

        bool all = true;
        for (const CheckLine& c : lines) {
            print_check(out, c);
            all = all && c.pass;
        }
        out << (all ? "all checks passed" : "some checks FAILED") << "\n";
        return all ? kExitOk : kExitCheckFailed;
    } catch (const std::exception& e) {
        return classify_error(e, err);
    }
}

}  // namespace wpflow
