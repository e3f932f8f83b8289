// Test-only reference computations: finite-difference derivatives, a dense
// least-squares solve for the multiplier pair, and a restart-based reference
// minimizer for the proximal problem. These deliberately avoid the library's
// analytic gradient and multiplier code paths.
#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "wpflow/constraints.hpp"
#include "wpflow/errors.hpp"
#include "wpflow/functionals.hpp"
#include "wpflow/grid.hpp"

namespace wpflow::testing {

inline Field mean_zeroed(Field f) {
    double m = mean(f);
    for (double& x : f.values) x -= m;
    return f;
}

// Smooth random field: a few cosine modes plus a constant offset. Keeps
// finite-difference truncation ahead of roundoff in derivative checks.
inline Field random_smooth_field(const Grid& g, std::mt19937& rng, double offset = 0.3,
                                 double amp = 0.5, int modes = 5) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::vector<double> cx(modes + 1, 0.0), cy(modes + 1, 0.0);
    for (int k = 1; k <= modes; ++k) cx[k] = coef(rng);
    for (int k = 1; k <= modes; ++k) cy[k] = coef(rng);
    const double pi = 3.14159265358979323846;
    return Field::from_function(g, [&](double x, double y) {
        double v = offset;
        for (int k = 1; k <= modes; ++k) {
            v += amp * cx[k] * std::cos(k * pi * x / g.Lx) / k;
            if (g.dim == 2) v += amp * cy[k] * std::cos(k * pi * y / g.Ly) / k;
        }
        return v;
    });
}

inline Field random_noise_field(const Grid& g, std::mt19937& rng, double amp = 1.0) {
    std::uniform_real_distribution<double> u(-amp, amp);
    Field f(g);
    for (double& x : f.values) x = u(rng);
    return f;
}

// Central finite difference of a scalar-valued map along a fixed direction.
inline double directional_fd(const std::function<double(const Field&)>& fn, const Field& w,
                             const Field& d, double eps) {
    Field wp = w, wm = w;
    axpy(wp, eps, d);
    axpy(wm, -eps, d);
    return (fn(wp) - fn(wm)) / (2.0 * eps);
}

// Componentwise finite-difference gradient w.r.t. the quadrature inner
// product (divide by the cell measure so <grad, d> matches directional
// derivatives).
inline Field componentwise_fd_gradient(const std::function<double(const Field&)>& fn,
                                       const Field& w, double eps) {
    Field g(w.grid);
    for (std::size_t i = 0; i < w.size(); ++i) {
        Field wp = w, wm = w;
        wp[i] += eps;
        wm[i] -= eps;
        g[i] = (fn(wp) - fn(wm)) / (2.0 * eps * w.grid.cell_measure());
    }
    return g;
}

// Dense normal-equations solve of min ||g - A 1 - B mu||_2 over (A, B).
struct DenseMultipliers {
    double A = 0.0;
    double B = 0.0;
};

inline DenseMultipliers dense_multiplier_lsq(const Field& g, const Field& mu) {
    double m11 = 0.0, m12 = 0.0, m22 = 0.0, b1 = 0.0, b2 = 0.0;
    const double h = g.grid.cell_measure();
    for (std::size_t i = 0; i < g.size(); ++i) {
        m11 += h;
        m12 += mu[i] * h;
        m22 += mu[i] * mu[i] * h;
        b1 += g[i] * h;
        b2 += g[i] * mu[i] * h;
    }
    double det = m11 * m22 - m12 * m12;
    DenseMultipliers out;
    out.A = (m22 * b1 - m12 * b2) / det;
    out.B = (m11 * b2 - m12 * b1) / det;
    return out;
}

// Restart-based reference for min ||w - f||^2/2 + tau E[w] over the
// constraint manifold. Gradients come from finite differences of the bare
// functionals; only the retraction is shared with the implementation.
inline double brute_force_proximal_objective(const PhaseState& f_state,
                                             const ConstraintSpec& spec, double tau,
                                             const PotentialParams& p, int restarts,
                                             unsigned seed) {
    const Field& f = f_state.v;
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double radius = std::sqrt(std::max(2.0 * tau * f_state.energy, 1e-30));

    auto objective = [&](const Field& w) {
        Field d = w - f;
        return 0.5 * inner(d, d) + tau * energy_E(w, p);
    };
    auto area = [&](const Field& w) { return area_F(w, p); };

    double best = objective(f);
    for (int trial = 0; trial < restarts; ++trial) {
        Field w = f;
        if (trial > 0) {
            Field z(f.grid);
            for (double& x : z.values) x = gauss(rng);
            double zn = norm_l2(z);
            if (zn == 0.0) continue;
            axpy(w, radius * (0.05 + 1.95 * unif(rng)) / zn, z);
            try {
                w = retract_to_manifold(w, spec, p);
            } catch (const SolverError&) {
                continue;
            }
        }
        double obj = objective(w);
        for (int it = 0; it < 3000; ++it) {
            Field gPhi = componentwise_fd_gradient(objective, w, 1e-6);
            Field gF = componentwise_fd_gradient(area, w, 1e-6);
            double gFm = mean(gF);
            Field dev = gF;
            for (double& x : dev.values) x -= gFm;
            double m2 = inner(dev, dev);
            if (m2 < 1e-18) break;
            double B = inner(gPhi, dev) / m2;
            double A = mean(gPhi) - B * gFm;
            Field r = gPhi;
            for (std::size_t i = 0; i < r.size(); ++i) r[i] -= A + B * gF[i];
            double rn2 = inner(r, r);
            if (std::sqrt(rn2) <= 1e-8) break;
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

}  // namespace wpflow::testing
