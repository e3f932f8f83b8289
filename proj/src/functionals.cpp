#include "wpflow/functionals.hpp"

#include <cmath>
#include <stdexcept>

namespace wpflow {

PotentialParams::PotentialParams(double a_) : a(a_) {
    if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("potential coefficient a must be positive");
}

double W(double r, const PotentialParams& p) {
    double q = r * r - 1.0;
    return 0.25 * p.a * q * q;
}

double W1(double r, const PotentialParams& p) { return p.a * (r * r * r - r); }

double W2(double r, const PotentialParams& p) { return p.a * (3.0 * r * r - 1.0); }

double W3(double r, const PotentialParams& p) { return 6.0 * p.a * r; }

double area_F(const Field& w, const PotentialParams& p) {
    Field Ww(w.grid);
    for (std::size_t i = 0; i < w.size(); ++i) Ww[i] = W(w[i], p);
    return dirichlet_energy(w) + integrate(Ww);
}

Field chemical_potential(const Field& w, const PotentialParams& p) {
    Field mu = laplacian(w);
    for (std::size_t i = 0; i < w.size(); ++i) mu[i] = -mu[i] + W1(w[i], p);
    return mu;
}

double energy_E(const Field& w, const PotentialParams& p) {
    Field mu = chemical_potential(w, p);
    return 0.5 * inner(mu, mu);
}

Field grad_E(const Field& w, const Field& mu, const PotentialParams& p) {
    Field out = laplacian(mu);
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = -out[i] + W2(w[i], p) * mu[i];
    return out;
}

Field grad_E(const Field& w, const PotentialParams& p) {
    return grad_E(w, chemical_potential(w, p), p);
}

PhaseState make_state(const Field& v, const PotentialParams& p) {
    if (!v.all_finite()) throw std::invalid_argument("field has non-finite values");
    PhaseState s;
    s.v = v;
    s.mu = chemical_potential(v, p);
    s.energy = 0.5 * inner(s.mu, s.mu);
    s.area = area_F(v, p);
    s.mean_v = mean(v);
    double mu_bar = mean(s.mu);
    Field dev = s.mu;
    for (double& x : dev.values) x -= mu_bar;
    s.margin = norm_l2(dev);
    return s;
}

}  // namespace wpflow
