#pragma once

#include <vector>

#include "wpflow/grid.hpp"

namespace wpflow {

enum class SolveMethod { Spectral, Iterative };

/**
 * Solver plan for the inverse Neumann Laplacian N: given mean-zero w,
 * N(w) is the unique mean-zero solution of -laplacian(u) = w.
 *
 * The spectral method diagonalizes the reflected-ghost stencil in the
 * cell-centered cosine basis (eigenvalues -(2/h^2)(1 - cos(k pi / n)) per
 * axis) and is exact up to roundoff. The iterative method is conjugate
 * gradients restricted to the mean-zero subspace.
 */
class NeumannSolvePlan {
  public:
    explicit NeumannSolvePlan(const Grid& grid, SolveMethod method = SolveMethod::Spectral,
                              double tolerance = 1e-12);

    const Grid& grid() const { return grid_; }
    SolveMethod method() const { return method_; }

    /// N(w). Throws NonZeroMeanError if |mean(w)| > 1e-10 (||w||_2 + 1);
    /// smaller means are projected out before solving.
    Field solve(const Field& w) const;

    /// <N(w), w> = ||grad N(w)||_2^2; the squared H1-dual norm of w.
    double dual_norm_sq(const Field& w) const;

    /// (I + t * laplacian^2)^{-1} w, applied spectrally. Used as the
    /// preconditioner for the fourth-order proximal solves.
    Field solve_shifted_biharmonic(const Field& w, double t) const;

    /// (I - t * laplacian)^{-1} w, applied spectrally. Used as the
    /// preconditioner for second-order area descent.
    Field solve_shifted_laplacian(const Field& w, double t) const;

    /// Eigenvalue of -laplacian for cosine mode k along the given axis.
    double eigenvalue(int axis, int k) const;

  private:
    Field solve_spectral(const Field& w) const;
    Field solve_cg(const Field& w) const;

    // Forward/inverse orthonormal cosine transform along both axes.
    std::vector<double> to_modes(const Field& w) const;
    Field from_modes(const std::vector<double>& c) const;

    Grid grid_;
    SolveMethod method_;
    double tolerance_;
    // Orthonormal cosine basis per axis, basis_x_[k*nx + i] = s_k cos(k pi (2i+1) / (2 nx)).
    std::vector<double> basis_x_;
    std::vector<double> basis_y_;
    std::vector<double> eig_x_;
    std::vector<double> eig_y_;
};

/// Convenience wrapper matching the plan's solve().
Field solve_N(const Field& w, const NeumannSolvePlan& plan);

/// Convenience wrapper matching the plan's dual_norm_sq().
double dual_norm_sq(const Field& w, const NeumannSolvePlan& plan);

}  // namespace wpflow
