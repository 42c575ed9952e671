#include "fano/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace fano {

namespace {

double entropy_from_moments(const complex& a, const complex& aa, double n) {
    const double m = n - std::norm(a);
    const complex p = aa - a * a;
    const double val = (m + 0.5) * (m + 0.5) - std::norm(p);
    return von_neumann_entropy(std::sqrt(std::max(val, 0.0)));
}

struct MomentVector {
    complex a;
    complex aa;
    double n;
};

MomentVector operator+(const MomentVector& x, const MomentVector& y) {
    return {x.a + y.a, x.aa + y.aa, x.n + y.n};
}

MomentVector operator*(double s, const MomentVector& x) { return {s * x.a, s * x.aa, s * x.n}; }

// Generator data at one instant.
struct Gen {
    double omega_r;
    double gamma;
    double gamma_N;
    complex f;
    complex delta;
};

MomentVector rhs(const Gen& g, const MomentVector& y) {
    const complex L{-0.5 * g.gamma, -g.omega_r};
    MomentVector d;
    d.a = L * y.a + g.f;
    d.aa = 2.0 * L * y.aa + 2.0 * g.f * y.a - g.delta;
    d.n = -g.gamma * y.n + g.gamma_N + 2.0 * (g.f * std::conj(y.a)).real();
    return d;
}

bool bad(const MomentVector& y) {
    const double cap = 1e12;
    return !std::isfinite(y.n) || !std::isfinite(y.a.real()) || !std::isfinite(y.a.imag()) ||
           !std::isfinite(y.aa.real()) || !std::isfinite(y.aa.imag()) || std::abs(y.n) > cap ||
           std::abs(y.a) > cap || std::abs(y.aa) > cap;
}

}  // namespace

double symplectic_nu(const GaussianModeState& s) {
    const double m = s.n - std::norm(s.a);
    const complex p = s.aa - s.a * s.a;
    const double val = (m + 0.5) * (m + 0.5) - std::norm(p);
    return std::sqrt(std::max(val, 0.0));
}

void validate_state(const GaussianModeState& s) {
    if (symplectic_nu(s) < 0.5 - 1e-9)
        throw std::invalid_argument(
            "GaussianModeState: moments violate the uncertainty bound (nu < 1/2); "
            "not a physical Gaussian state");
}

double von_neumann_entropy(double nu) {
    if (nu < 0.5) {
        if (nu < 0.5 - 1e-9)
            throw std::domain_error("von_neumann_entropy: nu must be >= 1/2");
        nu = 0.5;
    }
    const double up = nu + 0.5;
    const double dn = nu - 0.5;
    return up * std::log(up) - (dn > 0.0 ? dn * std::log(dn) : 0.0);
}

StateSeries propagate_closed_form(const GreenFunction& gf, const CoefficientSeries& coeffs,
                                  const GaussianModeState& initial) {
    validate_state(initial);
    const std::size_t n_pts = gf.grid.size();
    if (coeffs.F.size() != n_pts || coeffs.bath_I.size() != n_pts || coeffs.Jsq.size() != n_pts)
        throw std::invalid_argument("propagate_closed_form: coefficient/propagator grid mismatch");

    StateSeries out;
    out.grid = gf.grid;
    out.a.resize(n_pts);
    out.aa.resize(n_pts);
    out.n.resize(n_pts);
    out.entropy.resize(n_pts);
    for (std::size_t k = 0; k < n_pts; ++k) {
        const complex G = gf.g[k];
        const complex F = coeffs.F[k];
        out.a[k] = G * initial.a + F;
        out.aa[k] = G * G * initial.aa + 2.0 * G * F * initial.a + F * F - coeffs.Jsq[k];
        out.n[k] = std::norm(G) * initial.n + 2.0 * (G * initial.a * std::conj(F)).real() +
                   std::norm(F) + coeffs.bath_I[k];
        out.entropy[k] = entropy_from_moments(out.a[k], out.aa[k], out.n[k]);
    }
    return out;
}

StateSeries propagate_ode(const CoefficientSeries& coeffs, const GaussianModeState& initial,
                          std::size_t substeps) {
    validate_state(initial);
    if (substeps == 0) throw std::invalid_argument("propagate_ode: substeps must be positive");
    const std::size_t n_pts = coeffs.grid.size();
    if (coeffs.omega_r.size() != n_pts || coeffs.gamma.size() != n_pts ||
        coeffs.gamma_N.size() != n_pts || coeffs.f.size() != n_pts ||
        coeffs.delta.size() != n_pts)
        throw std::invalid_argument("propagate_ode: coefficient series/grid mismatch");

    auto gen_at = [&](std::size_t k) -> Gen {
        return Gen{coeffs.omega_r[k], coeffs.gamma[k], coeffs.gamma_N[k], coeffs.f[k],
                   coeffs.delta[k]};
    };
    auto gen_blend = [](const Gen& x, const Gen& y, double w) -> Gen {
        const double v = 1.0 - w;
        return Gen{v * x.omega_r + w * y.omega_r, v * x.gamma + w * y.gamma,
                   v * x.gamma_N + w * y.gamma_N, v * x.f + w * y.f, v * x.delta + w * y.delta};
    };

    for (std::size_t attempt = 0;; ++attempt) {
        const std::size_t sub = substeps << attempt;
        StateSeries out;
        out.grid = coeffs.grid;
        out.a.resize(n_pts);
        out.aa.resize(n_pts);
        out.n.resize(n_pts);
        out.entropy.resize(n_pts);

        MomentVector y{initial.a, initial.aa, initial.n};
        out.a[0] = y.a;
        out.aa[0] = y.aa;
        out.n[0] = y.n;
        out.entropy[0] = entropy_from_moments(y.a, y.aa, y.n);

        bool diverged = false;
        const double h = coeffs.grid.dt / static_cast<double>(sub);
        for (std::size_t k = 1; k < n_pts && !diverged; ++k) {
            const Gen g0 = gen_at(k - 1);
            const Gen g1 = gen_at(k);
            for (std::size_t s = 0; s < sub; ++s) {
                const double w0 = static_cast<double>(s) / static_cast<double>(sub);
                const double wh = (static_cast<double>(s) + 0.5) / static_cast<double>(sub);
                const double w1 = static_cast<double>(s + 1) / static_cast<double>(sub);
                const Gen ga = gen_blend(g0, g1, w0);
                const Gen gm = gen_blend(g0, g1, wh);
                const Gen gb = gen_blend(g0, g1, w1);
                const MomentVector k1 = rhs(ga, y);
                const MomentVector k2 = rhs(gm, y + (0.5 * h) * k1);
                const MomentVector k3 = rhs(gm, y + (0.5 * h) * k2);
                const MomentVector k4 = rhs(gb, y + h * k3);
                y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                if (bad(y)) {
                    diverged = true;
                    break;
                }
            }
            if (!diverged) {
                out.a[k] = y.a;
                out.aa[k] = y.aa;
                out.n[k] = y.n;
                out.entropy[k] = entropy_from_moments(y.a, y.aa, y.n);
            }
        }
        if (!diverged) return out;
        if (attempt >= 8)
            throw std::runtime_error(
                "propagate_ode: moment integration diverged even after eight step halvings");
    }
}

}  // namespace fano
