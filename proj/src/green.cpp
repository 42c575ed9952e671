#include "fano/green.hpp"

#include <cmath>
#include <sstream>

namespace fano {

namespace {

// Memory kernel in the frame rotating at omega0, sampled on the grid:
// Ktilde(t_m) = K(t_m) e^{i omega0 t_m}.
std::vector<complex> rotating_kernel_table(const SpectralDensity& J, double omega0,
                                           const TimeGrid& grid, const FrequencyCutoff& cutoff) {
    std::vector<complex> k(grid.size());
    for (std::size_t m = 0; m < k.size(); ++m) {
        const double t = grid.t(m);
        k[m] = memory_kernel(J, t, cutoff) * std::exp(I_UNIT * omega0 * t);
    }
    return k;
}

std::string format_time(double t) {
    std::ostringstream ss;
    ss.precision(12);
    ss << t;
    return ss.str();
}

}  // namespace

LorentzianRoots lorentzian_roots(const LorentzianSpectralDensity& J, double omega0) {
    if (!(J.gamma0 > 0.0) || !(J.eta > 0.0))
        throw std::invalid_argument("lorentzian_roots: gamma0 and eta must be positive");
    const double detuning = omega0 - J.omega_c;
    const complex b{J.eta, -detuning};  // mu^2 + b mu + c = 0
    const complex c{0.5 * J.gamma0 * J.eta, 0.0};
    const complex disc = std::sqrt(b * b - 4.0 * c);
    LorentzianRoots r;
    r.mu1 = 0.5 * (-b + disc);
    r.mu2 = 0.5 * (-b - disc);
    const double scale = std::max({std::abs(r.mu1), std::abs(r.mu2), 1e-300});
    r.degenerate = std::abs(r.mu1 - r.mu2) < 1e-12 * scale;
    r.mu_slow = (r.mu1.real() >= r.mu2.real()) ? r.mu1 : r.mu2;
    return r;
}

AsymptoticRates lorentzian_asymptotic_rates(const LorentzianSpectralDensity& J, double omega0) {
    const auto r = lorentzian_roots(J, omega0);
    return AsymptoticRates{omega0 - r.mu_slow.imag(), -2.0 * r.mu_slow.real()};
}

GreenFunction green_flat(double gamma0, double omega0, const TimeGrid& grid) {
    if (!(gamma0 >= 0.0)) throw std::invalid_argument("green_flat: gamma0 must be >= 0");
    GreenFunction gf;
    gf.grid = grid;
    gf.g.resize(grid.size());
    gf.gdot.resize(grid.size());
    const complex rate = -I_UNIT * omega0 - 0.5 * gamma0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        gf.g[k] = std::exp(rate * grid.t(k));
        gf.gdot[k] = rate * gf.g[k];
    }
    return gf;
}

GreenFunction green_lorentzian_closed(const LorentzianSpectralDensity& J, double omega0,
                                      const TimeGrid& grid) {
    const auto r = lorentzian_roots(J, omega0);
    GreenFunction gf;
    gf.grid = grid;
    gf.g.resize(grid.size());
    gf.gdot.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double t = grid.t(k);
        complex h, hdot;
        if (r.degenerate) {
            const complex mu = 0.5 * (r.mu1 + r.mu2);
            const complex e = std::exp(mu * t);
            h = (1.0 - mu * t) * e;
            hdot = -mu * mu * t * e;
        } else {
            const complex e1 = std::exp(r.mu1 * t);
            const complex e2 = std::exp(r.mu2 * t);
            const complex den = r.mu2 - r.mu1;
            h = (r.mu2 * e1 - r.mu1 * e2) / den;
            hdot = r.mu1 * r.mu2 * (e1 - e2) / den;
        }
        const complex phase = std::exp(-I_UNIT * omega0 * t);
        gf.g[k] = phase * h;
        gf.gdot[k] = phase * (hdot - I_UNIT * omega0 * h);
    }
    return gf;
}

GreenFunction solve_volterra(const SpectralDensity& J, double omega0, const TimeGrid& grid,
                             const FrequencyCutoff& cutoff) {
    const std::vector<complex> kt = rotating_kernel_table(J, omega0, grid, cutoff);
    const double dt = grid.dt;
    const std::size_t n_pts = grid.size();

    // H = e^{i omega0 t} G obeys dH/dt = -int_0^t Ktilde(t - tau) H(tau) dtau.
    // Product-trapezoid history plus trapezoidal (implicit) time stepping,
    // globally second order in dt.
    std::vector<complex> h(n_pts), rhs(n_pts);
    h[0] = 1.0;
    rhs[0] = 0.0;
    const complex denom = 1.0 + 0.25 * dt * dt * kt[0];
    for (std::size_t n = 1; n < n_pts; ++n) {
        complex hist = 0.5 * kt[n];  // j = 0 endpoint, H_0 = 1
        for (std::size_t j = 1; j < n; ++j) hist += kt[n - j] * h[j];
        const complex known = -dt * hist;
        h[n] = (h[n - 1] + 0.5 * dt * (rhs[n - 1] + known)) / denom;
        rhs[n] = known - 0.5 * dt * kt[0] * h[n];
    }

    GreenFunction gf;
    gf.grid = grid;
    gf.g.resize(n_pts);
    gf.gdot.resize(n_pts);
    for (std::size_t n = 0; n < n_pts; ++n) {
        const complex phase = std::exp(-I_UNIT * omega0 * grid.t(n));
        gf.g[n] = phase * h[n];
        gf.gdot[n] = phase * (rhs[n] - I_UNIT * omega0 * h[n]);
    }
    return gf;
}

complex green_laplace(const SpectralDensity& J, double omega0, double omega,
                      const FrequencyCutoff& cutoff) {
    const complex khat = kernel_laplace(J, omega, cutoff);
    return 1.0 / (I_UNIT * (omega0 - omega) + khat);
}

SecondOrderSeries green_second_order(const SpectralDensity& J, double lambda, double omega0,
                                     const TimeGrid& grid, const FrequencyCutoff& cutoff) {
    if (!(lambda > 0.0)) throw std::invalid_argument("green_second_order: lambda must be positive");
    const std::vector<complex> kt = rotating_kernel_table(J, omega0, grid, cutoff);
    const double dt = grid.dt;
    SecondOrderSeries out;
    out.grid = grid;
    out.g.resize(grid.size());
    out.log_deriv.resize(grid.size());

    // a(t) = int_0^t Ktilde, b(t) = int_0^t a: cumulative trapezoids.
    complex a{0.0, 0.0}, b{0.0, 0.0};
    complex a_prev = a;
    const double l2 = lambda * lambda;
    for (std::size_t n = 0; n < grid.size(); ++n) {
        if (n > 0) {
            a_prev = a;
            a += 0.5 * dt * (kt[n - 1] + kt[n]);
            b += 0.5 * dt * (a_prev + a);
        }
        const double t = grid.t(n);
        out.log_deriv[n] = -I_UNIT * omega0 - l2 * a;
        out.g[n] = std::exp(-I_UNIT * omega0 * t - l2 * b);
    }
    return out;
}

std::vector<complex> log_derivative(const GreenFunction& gf) {
    if (gf.g.size() != gf.grid.size() || gf.gdot.size() != gf.grid.size())
        throw std::invalid_argument("log_derivative: inconsistent series lengths");
    std::vector<complex> out(gf.g.size());
    for (std::size_t k = 0; k < gf.g.size(); ++k) {
        if (std::abs(gf.g[k]) < 1e-10)
            throw std::runtime_error(
                "log_derivative: |G| below 1e-10 at t = " + format_time(gf.grid.t(k)) +
                "; the ratio Gdot/G is not defined there");
        out[k] = gf.gdot[k] / gf.g[k];
    }
    return out;
}

}  // namespace fano
