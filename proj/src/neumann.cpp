#include "wpflow/neumann.hpp"

#include <cmath>
#include <numbers>

#include "wpflow/errors.hpp"

namespace wpflow {

namespace {

// Orthonormal cell-centered cosine basis for one axis, row k holding
// s_k cos(k pi (2i+1) / (2n)). Rows are the eigenvectors of the
// reflected-ghost Neumann stencil.
std::vector<double> cosine_basis(int n) {
    std::vector<double> b(static_cast<std::size_t>(n) * n);
    const double s0 = std::sqrt(1.0 / n);
    const double sk = std::sqrt(2.0 / n);
    for (int k = 0; k < n; ++k) {
        double scale = k == 0 ? s0 : sk;
        for (int i = 0; i < n; ++i)
            b[static_cast<std::size_t>(k) * n + i] =
                scale * std::cos(k * std::numbers::pi * (2 * i + 1) / (2.0 * n));
    }
    return b;
}

std::vector<double> stencil_eigenvalues(int n, double h) {
    std::vector<double> eig(n);
    for (int k = 0; k < n; ++k)
        eig[k] = (2.0 / (h * h)) * (1.0 - std::cos(k * std::numbers::pi / n));
    return eig;
}

}  // namespace

NeumannSolvePlan::NeumannSolvePlan(const Grid& grid, SolveMethod method, double tolerance)
    : grid_(grid), method_(method), tolerance_(tolerance) {
    basis_x_ = cosine_basis(grid.nx);
    eig_x_ = stencil_eigenvalues(grid.nx, grid.hx);
    if (grid.dim == 2) {
        basis_y_ = cosine_basis(grid.ny);
        eig_y_ = stencil_eigenvalues(grid.ny, grid.hy);
    } else {
        eig_y_ = {0.0};
    }
}

double NeumannSolvePlan::eigenvalue(int axis, int k) const {
    return axis == 0 ? eig_x_[k] : eig_y_[k];
}

std::vector<double> NeumannSolvePlan::to_modes(const Field& w) const {
    const int nx = grid_.nx, ny = grid_.ny;
    std::vector<double> c(w.size());
    // Transform along x: c[j, k] = sum_i basis_x[k, i] w[j, i].
    for (int j = 0; j < ny; ++j) {
        for (int k = 0; k < nx; ++k) {
            double s = 0.0;
            const double* row = &basis_x_[static_cast<std::size_t>(k) * nx];
            for (int i = 0; i < nx; ++i) s += row[i] * w.values[static_cast<std::size_t>(j) * nx + i];
            c[static_cast<std::size_t>(j) * nx + k] = s;
        }
    }
    if (grid_.dim == 1) return c;
    // Transform along y in place.
    std::vector<double> out(c.size());
    for (int k = 0; k < nx; ++k) {
        for (int l = 0; l < ny; ++l) {
            double s = 0.0;
            const double* row = &basis_y_[static_cast<std::size_t>(l) * ny];
            for (int j = 0; j < ny; ++j) s += row[j] * c[static_cast<std::size_t>(j) * nx + k];
            out[static_cast<std::size_t>(l) * nx + k] = s;
        }
    }
    return out;
}

Field NeumannSolvePlan::from_modes(const std::vector<double>& c) const {
    const int nx = grid_.nx, ny = grid_.ny;
    std::vector<double> tmp = c;
    if (grid_.dim == 2) {
        std::vector<double> t(c.size());
        for (int k = 0; k < nx; ++k) {
            for (int j = 0; j < ny; ++j) {
                double s = 0.0;
                for (int l = 0; l < ny; ++l)
                    s += basis_y_[static_cast<std::size_t>(l) * ny + j] * c[static_cast<std::size_t>(l) * nx + k];
                t[static_cast<std::size_t>(j) * nx + k] = s;
            }
        }
        tmp = std::move(t);
    }
    Field w(grid_);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            double s = 0.0;
            for (int k = 0; k < nx; ++k)
                s += basis_x_[static_cast<std::size_t>(k) * nx + i] * tmp[static_cast<std::size_t>(j) * nx + k];
            w.values[static_cast<std::size_t>(j) * nx + i] = s;
        }
    }
    return w;
}

Field NeumannSolvePlan::solve(const Field& w) const {
    double m = mean(w);
    if (std::abs(m) > 1e-10 * (norm_l2(w) + 1.0))
        throw NonZeroMeanError("solve_N requires a mean-zero right-hand side");
    Field rhs = w;
    for (double& x : rhs.values) x -= m;  // project out residual mean drift
    Field u = method_ == SolveMethod::Spectral ? solve_spectral(rhs) : solve_cg(rhs);
    double mu = mean(u);
    for (double& x : u.values) x -= mu;
    return u;
}

Field NeumannSolvePlan::solve_spectral(const Field& rhs) const {
    std::vector<double> c = to_modes(rhs);
    const int nx = grid_.nx, ny = grid_.ny;
    for (int l = 0; l < ny; ++l) {
        for (int k = 0; k < nx; ++k) {
            double lambda = eig_x_[k] + (grid_.dim == 2 ? eig_y_[l] : 0.0);
            std::size_t idx = static_cast<std::size_t>(l) * nx + k;
            c[idx] = lambda > 0.0 ? c[idx] / lambda : 0.0;
        }
    }
    return from_modes(c);
}

// Conjugate gradients on the mean-zero subspace; -laplacian is SPD there.
Field NeumannSolvePlan::solve_cg(const Field& rhs) const {
    Field u(grid_);
    Field r = rhs;
    Field pdir = r;
    double rr = inner(r, r);
    double rhs_norm = std::sqrt(rr);
    if (rhs_norm == 0.0) return u;
    const int cap = 20 * static_cast<int>(grid_.size()) + 100;
    for (int it = 0; it < cap; ++it) {
        if (std::sqrt(rr) <= tolerance_ * rhs_norm) return u;
        Field Ap = laplacian(pdir);
        for (double& x : Ap.values) x = -x;
        double pAp = inner(pdir, Ap);
        if (pAp <= 0.0) throw NoConvergenceError("conjugate gradients lost positive definiteness");
        double a = rr / pAp;
        axpy(u, a, pdir);
        axpy(r, -a, Ap);
        double mr = mean(r);
        for (double& x : r.values) x -= mr;  // keep the iteration on the subspace
        double rr_new = inner(r, r);
        double b = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < pdir.size(); ++i) pdir[i] = r[i] + b * pdir[i];
    }
    throw NoConvergenceError("conjugate gradients exceeded the iteration cap");
}

double NeumannSolvePlan::dual_norm_sq(const Field& w) const {
    double v = inner(solve(w), w);
    return v > 0.0 ? v : 0.0;
}

Field NeumannSolvePlan::solve_shifted_biharmonic(const Field& w, double t) const {
    std::vector<double> c = to_modes(w);
    const int nx = grid_.nx, ny = grid_.ny;
    for (int l = 0; l < ny; ++l) {
        for (int k = 0; k < nx; ++k) {
            double lambda = eig_x_[k] + (grid_.dim == 2 ? eig_y_[l] : 0.0);
            std::size_t idx = static_cast<std::size_t>(l) * nx + k;
            c[idx] /= 1.0 + t * lambda * lambda;
        }
    }
    return from_modes(c);
}

Field NeumannSolvePlan::solve_shifted_laplacian(const Field& w, double t) const {
    std::vector<double> c = to_modes(w);
    const int nx = grid_.nx, ny = grid_.ny;
    for (int l = 0; l < ny; ++l) {
        for (int k = 0; k < nx; ++k) {
            double lambda = eig_x_[k] + (grid_.dim == 2 ? eig_y_[l] : 0.0);
            std::size_t idx = static_cast<std::size_t>(l) * nx + k;
            c[idx] /= 1.0 + t * lambda;
        }
    }
    return from_modes(c);
}

Field solve_N(const Field& w, const NeumannSolvePlan& plan) { return plan.solve(w); }

double dual_norm_sq(const Field& w, const NeumannSolvePlan& plan) { return plan.dual_norm_sq(w); }

}  // namespace wpflow
