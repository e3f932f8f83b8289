#include "wpflow/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace wpflow {

namespace {

void check_axis(double L, int n) {
    if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("grid extent must be positive");
    if (n < 4) throw std::invalid_argument("grid needs at least 4 nodes per axis");
}

void check_same_grid(const Field& a, const Field& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("fields live on different grids");
}

// Neumaier compensated sum; keeps quadrature deterministic and nearly
// independent of summation-order roundoff.
double compensated_sum(const std::vector<double>& v) {
    double s = 0.0, c = 0.0;
    for (double x : v) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    return s + c;
}

}  // namespace

Grid Grid::make_1d(double Lx, int nx) {
    check_axis(Lx, nx);
    Grid g;
    g.dim = 1;
    g.nx = nx;
    g.ny = 1;
    g.Lx = Lx;
    g.Ly = 1.0;
    g.hx = Lx / nx;
    g.hy = 1.0;
    return g;
}

Grid Grid::make_2d(double Lx, double Ly, int nx, int ny) {
    check_axis(Lx, nx);
    check_axis(Ly, ny);
    Grid g;
    g.dim = 2;
    g.nx = nx;
    g.ny = ny;
    g.Lx = Lx;
    g.Ly = Ly;
    g.hx = Lx / nx;
    g.hy = Ly / ny;
    return g;
}

bool Field::all_finite() const {
    for (double x : values)
        if (!std::isfinite(x)) return false;
    return true;
}

Field operator+(const Field& a, const Field& b) {
    check_same_grid(a, b);
    Field out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
}

Field operator-(const Field& a, const Field& b) {
    check_same_grid(a, b);
    Field out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
    return out;
}

Field operator*(double c, const Field& a) {
    Field out = a;
    for (double& x : out.values) x *= c;
    return out;
}

Field& operator+=(Field& a, const Field& b) {
    check_same_grid(a, b);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

Field& axpy(Field& y, double c, const Field& x) {
    check_same_grid(y, x);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += c * x[i];
    return y;
}

double integrate(const Field& w) { return compensated_sum(w.values) * w.grid.cell_measure(); }

double mean(const Field& w) { return integrate(w) / w.grid.measure(); }

double inner(const Field& u, const Field& v) {
    check_same_grid(u, v);
    std::vector<double> prod(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) prod[i] = u[i] * v[i];
    return compensated_sum(prod) * u.grid.cell_measure();
}

double norm_l2(const Field& w) {
    double s = inner(w, w);
    return s > 0.0 ? std::sqrt(s) : 0.0;
}

// Flux form: one rounding per node keeps integrate(laplacian(w)) at the
// telescoping-cancellation level instead of O(n eps / h^2).
Field laplacian(const Field& w) {
    const Grid& g = w.grid;
    Field out(g);
    const double ihx2 = 1.0 / (g.hx * g.hx);
    if (g.dim == 1) {
        const int n = g.nx;
        std::vector<double> flux(n + 1, 0.0);  // flux[i] across face i-1/2; boundaries stay 0
        for (int i = 1; i < n; ++i) flux[i] = (w[i] - w[i - 1]) * ihx2;
        for (int i = 0; i < n; ++i) out[i] = flux[i + 1] - flux[i];
        return out;
    }
    const int nx = g.nx, ny = g.ny;
    const double ihy2 = 1.0 / (g.hy * g.hy);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            double fw = i > 0 ? (w.at(i, j) - w.at(i - 1, j)) * ihx2 : 0.0;
            double fe = i < nx - 1 ? (w.at(i + 1, j) - w.at(i, j)) * ihx2 : 0.0;
            double fs = j > 0 ? (w.at(i, j) - w.at(i, j - 1)) * ihy2 : 0.0;
            double fn = j < ny - 1 ? (w.at(i, j + 1) - w.at(i, j)) * ihy2 : 0.0;
            out.at(i, j) = (fe - fw) + (fn - fs);
        }
    }
    return out;
}

double dirichlet_energy(const Field& w) {
    double e = -0.5 * inner(w, laplacian(w));
    return e > 0.0 ? e : 0.0;
}

double h1_norm_sq(const Field& w) { return inner(w, w) + 2.0 * dirichlet_energy(w); }

double h2_norm_sq(const Field& w) {
    Field lw = laplacian(w);
    return h1_norm_sq(w) + inner(lw, lw);
}

}  // namespace wpflow
