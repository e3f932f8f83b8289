#include "wpflow/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "wpflow/errors.hpp"

namespace wpflow {

namespace {

constexpr double kDegenerateMargin = 1e-10;

void shift_mean_to(Field& w, double alpha) {
    double c = alpha - mean(w);
    for (double& x : w.values) x += c;
}

Field mu_deviation(const Field& mu) {
    Field d = mu;
    double m = mean(mu);
    for (double& x : d.values) x -= m;
    return d;
}

// Seeds for the area minimization: constant, low cosine modes, and a
// mean-adjusted sign-split profile.
std::vector<Field> area_seeds(double alpha, const Grid& grid) {
    using std::numbers::pi;
    std::vector<Field> seeds;
    seeds.push_back(Field(grid, alpha));
    auto cos_seed = [&](double amp, int kx, int ky) {
        Field f = Field::from_function(grid, [&](double x, double y) {
            double v = amp * std::cos(kx * pi * x / grid.Lx);
            if (grid.dim == 2 && ky > 0) v *= std::cos(ky * pi * y / grid.Ly);
            return v;
        });
        shift_mean_to(f, alpha);
        return f;
    };
    seeds.push_back(cos_seed(0.1, 1, 0));
    seeds.push_back(cos_seed(0.1, 2, 0));
    if (grid.dim == 2)
        seeds.push_back(cos_seed(0.1, 1, 1));
    else
        seeds.push_back(cos_seed(0.05, 3, 0));
    Field split = Field::from_function(grid, [&](double x, double) {
        return 0.8 * std::tanh(8.0 * (x - 0.5 * grid.Lx) / grid.Lx);
    });
    shift_mean_to(split, alpha);
    seeds.push_back(split);
    return seeds;
}

struct SeedOutcome {
    bool converged = false;
    double value = 0.0;
    Field minimizer;
};

// Mean-projected descent on F with an H1 preconditioner. The descent
// direction is (I - laplacian)^{-1}(mu - mean(mu)), which preserves the
// mean exactly in mode space and tames the second-order stiffness.
SeedOutcome descend_area(Field v, double alpha, const PotentialParams& p,
                         const NeumannSolvePlan& plan) {
    constexpr int kMaxIters = 20000;
    constexpr double kGradTol = 1e-8;
    constexpr double kSlope = 1e-4;

    SeedOutcome out;
    double Fv = area_F(v, p);
    for (int it = 0; it < kMaxIters; ++it) {
        Field g = mu_deviation(chemical_potential(v, p));
        double gnorm = norm_l2(g);
        if (gnorm <= kGradTol) {
            out.converged = true;
            out.value = Fv;
            out.minimizer = std::move(v);
            return out;
        }
        Field d = plan.solve_shifted_laplacian(g, 1.0);
        double slope = inner(g, d);
        if (!(slope > 0.0)) {  // spectral roundoff fallback
            d = g;
            slope = gnorm * gnorm;
        }
        double sigma = 1.0;
        bool accepted = false;
        while (sigma >= 1e-16) {
            Field trial = v;
            axpy(trial, -sigma, d);
            shift_mean_to(trial, alpha);
            double Ft = area_F(trial, p);
            if (Ft <= Fv - kSlope * sigma * slope) {
                v = std::move(trial);
                Fv = Ft;
                accepted = true;
                break;
            }
            sigma *= 0.5;
        }
        if (!accepted) return out;  // stalled; caller treats the seed as failed
    }
    return out;
}

}  // namespace

ConstraintSpec::ConstraintSpec(double alpha_, double beta_, double tol_mean_, double tol_area_)
    : alpha(alpha_), beta(beta_), tol_mean(tol_mean_), tol_area(tol_area_) {
    if (!std::isfinite(alpha) || !std::isfinite(beta)) throw std::invalid_argument("constraint values must be finite");
    if (beta < 0.0) throw std::invalid_argument("area level beta must be nonnegative");
    if (!(tol_mean > 0.0) || !(tol_area > 0.0)) throw std::invalid_argument("tolerances must be positive");
}

AreaMinimum minimize_area(double alpha, const PotentialParams& p, const Grid& grid) {
    NeumannSolvePlan plan(grid);
    AreaMinimum best;
    bool have = false;
    for (Field& seed : area_seeds(alpha, grid)) {
        SeedOutcome o = descend_area(std::move(seed), alpha, p, plan);
        if (!o.converged) continue;
        if (!have || o.value < best.value) {
            best.value = o.value;
            best.minimizer = std::move(o.minimizer);
            have = true;
        }
        ++best.converged_seeds;
    }
    if (!have)
        throw NoConvergenceError("area minimization: no seed reached the gradient tolerance");
    return best;
}

double beta_alpha_estimate(double alpha, const PotentialParams& p, const Grid& grid) {
    return minimize_area(alpha, p, grid).value;
}

Field construct_feasible(const ConstraintSpec& spec, const Field& phi, const PotentialParams& p,
                         const Grid& grid) {
    if (!(phi.grid == grid)) throw std::invalid_argument("phi lives on a different grid");
    AreaMinimum am = minimize_area(spec.alpha, p, grid);
    if (!(spec.beta > am.value))
        throw InfeasibleBetaError("beta must exceed the estimated minimal area " +
                                  std::to_string(am.value));
    double phi_norm = norm_l2(phi);
    if (phi_norm == 0.0) throw ZeroDirectionError("phi is identically zero");
    if (std::abs(mean(phi)) > 1e-12 * (1.0 + phi_norm))
        throw ZeroDirectionError("phi must have zero mean");

    auto F_at = [&](double lambda) {
        Field w = am.minimizer;
        axpy(w, lambda, phi);
        return area_F(w, p);
    };

    // F(0) < beta and F -> infinity along the ray, so doubling brackets a root.
    double hi = 1.0;
    int guard = 0;
    while (F_at(hi) <= spec.beta) {
        hi *= 2.0;
        if (++guard > 200) throw NoConvergenceError("bracketing the area level failed");
    }
    double lo = 0.0;
    double lambda = hi;
    for (int it = 0; it < 400; ++it) {
        lambda = 0.5 * (lo + hi);
        double Fm = F_at(lambda);
        if (std::abs(Fm - spec.beta) <= 0.5 * spec.tol_area * spec.beta) break;
        (Fm < spec.beta ? lo : hi) = lambda;
    }

    Field w = am.minimizer;
    axpy(w, lambda, phi);
    shift_mean_to(w, spec.alpha);
    // Polish with the retraction so every manifold producer lands at the
    // same (tight) area precision.
    w = retract_to_manifold(w, spec, p);
    if (std::abs(area_F(w, p) - spec.beta) > spec.tol_area * spec.beta)
        throw NoConvergenceError("feasible construction missed the area tolerance");
    return w;
}

Field retract_to_manifold(const Field& w, const ConstraintSpec& spec, const PotentialParams& p) {
    if (std::abs(mean(w) - spec.alpha) > 0.1 * (1.0 + std::abs(spec.alpha)))
        throw OutsideTrustRegionError("mean too far from the prescribed value");

    Field v = w;
    shift_mean_to(v, spec.alpha);
    double Fv = area_F(v, p);
    if (std::abs(Fv - spec.beta) > 0.5 * spec.beta)
        throw OutsideTrustRegionError("area too far from the prescribed level");

    // Newton target sits well below the contract tolerance: residual area
    // error re-enters the proximal gradient scaled by 1/tau and would floor
    // the Euler-Lagrange residual there.
    const double tol = std::max(1e-3 * spec.tol_area * spec.beta,
                                5e-14 * std::max(spec.beta, 1.0));
    Field d;
    for (int it = 0; it < 30; ++it) {
        if (std::abs(Fv - spec.beta) <= tol) return v;
        Field mu = chemical_potential(v, p);
        d = mu_deviation(mu);
        double m2 = inner(d, d);
        if (std::sqrt(m2) < kDegenerateMargin)
            throw DegenerateDirectionError("constant chemical potential: area correction impossible");
        // dF/ds along d is <mu, d> = m2, so Newton's step is exact to O(s^2).
        axpy(v, (spec.beta - Fv) / m2, d);
        shift_mean_to(v, spec.alpha);
        Fv = area_F(v, p);
    }

    // Newton exhausted its budget: bisect along the last direction.
    auto resid = [&](double s) {
        Field t = v;
        axpy(t, s, d);
        shift_mean_to(t, spec.alpha);
        return area_F(t, p) - spec.beta;
    };
    double r0 = Fv - spec.beta;
    double step = r0 > 0.0 ? -1e-3 : 1e-3;
    double s_lo = 0.0, s_hi = step;
    int guard = 0;
    while (resid(s_hi) * r0 > 0.0) {
        s_lo = s_hi;
        s_hi *= 2.0;
        if (++guard > 80) throw NoConvergenceError("area retraction could not bracket the level");
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (s_lo + s_hi);
        double r = resid(mid);
        if (std::abs(r) <= tol) {
            axpy(v, mid, d);
            shift_mean_to(v, spec.alpha);
            return v;
        }
        (r * r0 > 0.0 ? s_lo : s_hi) = mid;
    }
    throw NoConvergenceError("area retraction did not converge");
}

bool z_empty_sufficient(const ConstraintSpec& spec, const PotentialParams& p, const Grid& grid) {
    double a2 = spec.alpha * spec.alpha;
    double lhs = 2.0 * spec.beta +
                 0.5 * p.a * grid.measure() * (2.0 * a2 - 1.0 - 27.0 * a2 * a2 / 16.0);
    return lhs > 0.0;
}

double m_M_probe(const std::vector<PhaseState>& states, const NeumannSolvePlan& plan) {
    double best = 0.0;
    bool have = false;
    for (const PhaseState& s : states) {
        double v = plan.dual_norm_sq(mu_deviation(s.mu));
        if (!have || v < best) {
            best = v;
            have = true;
        }
    }
    return have ? best : 0.0;
}

}  // namespace wpflow
