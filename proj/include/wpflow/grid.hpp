#pragma once

#include <cstddef>
#include <vector>

namespace wpflow {

/**
 * Uniform rectangular grid (1D or 2D) with cell-centered nodes and
 * homogeneous-Neumann discrete calculus.
 *
 * Nodes sit at x_i = (i + 1/2) h with h = L / n, so the reflected-ghost
 * Laplacian satisfies the discrete no-flux condition by construction and
 * integrate(laplacian(w)) vanishes identically.
 */
struct Grid {
    int dim = 1;      // 1 or 2
    int nx = 0;       // nodes along x
    int ny = 1;       // nodes along y (1 in 1D)
    double Lx = 0.0;  // extent along x
    double Ly = 1.0;  // extent along y (unused in 1D)
    double hx = 0.0;
    double hy = 0.0;

    static Grid make_1d(double Lx, int nx);
    static Grid make_2d(double Lx, double Ly, int nx, int ny);

    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
    // Quadrature weight of one node, h^dim.
    double cell_measure() const { return dim == 1 ? hx : hx * hy; }
    // |Omega|, the product of the extents.
    double measure() const { return dim == 1 ? Lx : Lx * Ly; }

    double x(int i) const { return (i + 0.5) * hx; }
    double y(int j) const { return (j + 0.5) * hy; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }

    bool operator==(const Grid&) const = default;
};

/// Nodal scalar field on a Grid, stored row-major.
struct Field {
    Grid grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    double& at(int i, int j) { return values[grid.index(i, j)]; }
    double at(int i, int j) const { return values[grid.index(i, j)]; }

    bool all_finite() const;

    template <class Fn>
    static Field from_function(const Grid& g, Fn&& fn) {
        Field f(g);
        if (g.dim == 1) {
            for (int i = 0; i < g.nx; ++i) f.values[i] = fn(g.x(i), 0.0);
        } else {
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) f.at(i, j) = fn(g.x(i), g.y(j));
        }
        return f;
    }
};

// Elementwise arithmetic; operands must share a grid.
Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double c, const Field& a);
Field& operator+=(Field& a, const Field& b);
Field& axpy(Field& y, double c, const Field& x);  // y += c*x

/// Midpoint-rule quadrature: sum_i w_i h^dim.
double integrate(const Field& w);

/// integrate(w) / |Omega|.
double mean(const Field& w);

/// Quadrature inner product sum_i u_i v_i h^dim.
double inner(const Field& u, const Field& v);

/// sqrt(inner(w, w)).
double norm_l2(const Field& w);

/// 3-point (1D) / 5-point (2D) Laplacian with reflected ghost nodes.
Field laplacian(const Field& w);

/// -<w, laplacian(w)>/2; nonnegative, zero exactly on constants.
double dirichlet_energy(const Field& w);

/// ||w||_2^2 + 2 * dirichlet_energy(w); stencil-compatible discrete H1.
double h1_norm_sq(const Field& w);

/// h1_norm_sq(w) + ||laplacian(w)||_2^2.
double h2_norm_sq(const Field& w);

}  // namespace wpflow
