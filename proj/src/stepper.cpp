#include "wpflow/stepper.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "wpflow/errors.hpp"

namespace wpflow {

namespace {

constexpr double kDegenerateMargin = 1e-10;
constexpr double kMinSigma = 1e-16;

struct Decomposition {
    Field r;
    double A = 0.0;
    double B = 0.0;
    double g_norm = 0.0;
    double margin = 0.0;
    double mu_mean = 0.0;
};

// Split g against span{1, mu}: B = <g, mu - mean(mu)> / ||mu - mean(mu)||^2,
// A = mean(g) - B mean(mu), r = g - A - B mu. By construction <r, 1> and
// <r, mu> vanish to roundoff.
Decomposition decompose(const Field& g, const Field& mu) {
    Decomposition d;
    d.mu_mean = mean(mu);
    Field dev = mu;
    for (double& x : dev.values) x -= d.mu_mean;
    double m2 = inner(dev, dev);
    d.margin = m2 > 0.0 ? std::sqrt(m2) : 0.0;
    if (d.margin < kDegenerateMargin)
        throw DegenerateDirectionError("chemical potential is numerically constant");
    d.B = inner(g, dev) / m2;
    d.A = mean(g) - d.B * d.mu_mean;
    d.r = g;
    for (std::size_t i = 0; i < g.size(); ++i) d.r[i] -= d.A + d.B * mu[i];
    d.g_norm = norm_l2(g);
    return d;
}

Field proximal_gradient(const Field& u, const Field& f, const Field& mu, double tau,
                        const PotentialParams& p) {
    Field g = grad_E(u, mu, p);
    double inv_tau = 1.0 / tau;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += (u[i] - f[i]) * inv_tau;
    return g;
}

}  // namespace

StepConfig::StepConfig(double tau_) : tau(tau_) { validate(); }

void StepConfig::validate() const {
    if (!(tau > 0.0) || !(tau < 1.0)) throw std::invalid_argument("tau must lie in (0, 1)");
    if (!(tol_el > 0.0)) throw std::invalid_argument("tol_el must be positive");
    if (max_inner < 1) throw std::invalid_argument("max_inner must be at least 1");
    if (!(armijo_shrink > 0.0 && armijo_shrink < 1.0))
        throw std::invalid_argument("armijo_shrink must lie in (0, 1)");
    if (!(armijo_slope > 0.0 && armijo_slope < 1.0))
        throw std::invalid_argument("armijo_slope must lie in (0, 1)");
    if (!(sigma0 > 0.0)) throw std::invalid_argument("sigma0 must be positive");
}

TangentialGradient tangential_gradient(const Field& u, const Field& f, const StepConfig& cfg,
                                       const PotentialParams& p) {
    cfg.validate();
    Field mu = chemical_potential(u, p);
    Field g = proximal_gradient(u, f, mu, cfg.tau, p);
    Decomposition d = decompose(g, mu);
    return TangentialGradient{std::move(d.r), d.A, d.B, d.g_norm};
}

MultiplierIdentityResiduals verify_multiplier_identities(const PhaseState& v, const Field& f,
                                                         double A, double B,
                                                         const StepConfig& cfg,
                                                         const PotentialParams& p) {
    (void)cfg;
    (void)f;
    const Field& mu = v.mu;
    double mu_bar = mean(mu);

    Field w2mu(v.v.grid);
    Field w2mu2(v.v.grid);
    for (std::size_t i = 0; i < mu.size(); ++i) {
        double w2 = W2(v.v[i], p);
        w2mu[i] = w2 * mu[i];
        w2mu2[i] = w2 * mu[i] * mu[i];
    }
    double w2mu_bar = mean(w2mu);

    MultiplierIdentityResiduals out;
    double lhs1 = A + B * mu_bar;
    out.a1 = std::abs(lhs1 - w2mu_bar) / (1.0 + std::abs(lhs1) + std::abs(w2mu_bar));

    double lhs2 = B * v.margin * v.margin;
    double rhs2 = 2.0 * dirichlet_energy(mu) + integrate(w2mu2) - w2mu_bar * integrate(mu);
    out.a2 = std::abs(lhs2 - rhs2) / (1.0 + std::abs(lhs2) + std::abs(rhs2));
    return out;
}

StepResult proximal_step(const PhaseState& f_state, const ConstraintSpec& spec,
                         const StepConfig& cfg, const PotentialParams& p,
                         const NeumannSolvePlan& plan) {
    cfg.validate();
    const Field& f = f_state.v;
    const double tau = cfg.tau;

    Field u = f;
    Field mu = f_state.mu;
    double phi_u = tau * f_state.energy;  // ||u - f||^2/2 vanishes at the start

    StepReport rep;
    rep.status = StepStatus::MaxInnerExceeded;
    int accepted = 0;

    for (int iter = 0;; ++iter) {
        Field g = proximal_gradient(u, f, mu, tau, p);
        Decomposition dec = decompose(g, mu);
        rep.A = dec.A;
        rep.B = dec.B;
        rep.el_residual = norm_l2(dec.r) / (1.0 + dec.g_norm);
        if (rep.el_residual <= cfg.tol_el) {
            rep.status = StepStatus::Converged;
            break;
        }
        if (iter >= cfg.max_inner) {
            rep.status = StepStatus::MaxInnerExceeded;
            break;
        }

        // Preconditioned tangential direction: tau (I + tau lap^2)^{-1} r with
        // the span{1, mu} component removed again. <r, d> stays positive
        // because the smoother is SPD and r is already orthogonal to the
        // span. The tau factor makes sigma = 1 the natural full step: the
        // objective Hessian is about (I + tau lap^2) / tau in the scaled
        // gradient's metric.
        Field d = plan.solve_shifted_biharmonic(dec.r, tau);
        for (double& x : d.values) x *= tau;
        {
            Field dev = mu;
            double mu_bar = dec.mu_mean;
            for (double& x : dev.values) x -= mu_bar;
            double m2 = dec.margin * dec.margin;
            double Bd = inner(d, dev) / m2;
            double Ad = mean(d) - Bd * mu_bar;
            for (std::size_t i = 0; i < d.size(); ++i) d[i] -= Ad + Bd * mu[i];
        }
        double slope = inner(dec.r, d);
        if (!(slope > 0.0)) {
            d = dec.r;
            for (double& x : d.values) x *= tau;
            slope = tau * inner(dec.r, dec.r);
        }

        double sigma = cfg.sigma0;
        bool step_taken = false;
        while (sigma >= kMinSigma) {
            Field trial = u;
            axpy(trial, -sigma, d);
            Field w;
            try {
                w = retract_to_manifold(trial, spec, p);
            } catch (const SolverError&) {
                sigma *= cfg.armijo_shrink;  // trial left the retraction's reach
                continue;
            }
            Field mu_w = chemical_potential(w, p);
            double E_w = 0.5 * inner(mu_w, mu_w);
            Field diff = w - f;
            double phi_w = 0.5 * inner(diff, diff) + tau * E_w;
            // The derivative of the objective along -d is -tau <r, d>.
            if (phi_w <= phi_u - cfg.armijo_slope * sigma * tau * slope) {
                u = std::move(w);
                mu = std::move(mu_w);
                phi_u = phi_w;
                step_taken = true;
                ++accepted;
                break;
            }
            sigma *= cfg.armijo_shrink;
        }
        if (!step_taken) {
            rep.status = StepStatus::LineSearchStall;
            break;
        }
    }

    PhaseState out = make_state(u, p);
    Field diff = out.v - f;
    double step_sq = inner(diff, diff);
    rep.inner_iters = accepted;
    rep.objective = phi_u;
    rep.mean_residual = std::abs(out.mean_v - spec.alpha);
    rep.area_residual = spec.beta > 0.0 ? std::abs(out.area - spec.beta) / spec.beta
                                        : std::abs(out.area - spec.beta);
    rep.decrease_ok = 0.5 * step_sq / tau + out.energy <=
                      f_state.energy + 1e-10 * (1.0 + f_state.energy);
    MultiplierIdentityResiduals ids = verify_multiplier_identities(out, f, rep.A, rep.B, cfg, p);
    rep.a1_residual = ids.a1;
    rep.a2_residual = ids.a2;
    return StepResult{std::move(out), rep};
}

}  // namespace wpflow
