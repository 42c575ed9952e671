#include "fano/driving.hpp"

#include <cmath>
#include <stdexcept>

#include "fano/parallel.hpp"

namespace fano {

namespace {

// Trapezoidal convolution (kernel * l)(t_n) on the shared grid, one output
// node per independent sum.
std::vector<complex> convolve(const std::vector<complex>& kernel, const std::vector<complex>& l,
                              double dt, unsigned workers) {
    const std::size_t m = kernel.size();
    std::vector<complex> out(m, complex(0.0, 0.0));
    parallel_for(m, workers, [&](std::size_t begin, std::size_t end, std::size_t) {
        for (std::size_t n = begin; n < end; ++n) {
            if (n == 0) continue;
            complex acc = 0.5 * (kernel[n] * l[0] + kernel[0] * l[n]);
            for (std::size_t j = 1; j < n; ++j) acc += kernel[n - j] * l[j];
            out[n] = dt * acc;
        }
    });
    return out;
}

std::vector<complex> bracket_convolve(const std::vector<complex>& log_deriv,
                                      const GreenFunction& gf, const std::vector<complex>& l,
                                      unsigned workers) {
    const std::size_t m = gf.g.size();
    if (l.size() != m)
        throw std::invalid_argument("renormalized_force: drive samples do not match the grid");
    const double dt = gf.grid.dt;
    std::vector<complex> out = l;
    parallel_for(m, workers, [&](std::size_t begin, std::size_t end, std::size_t) {
        for (std::size_t n = begin; n < end; ++n) {
            if (n == 0) continue;
            const complex ln = log_deriv[n];
            complex acc = 0.5 * ((log_deriv[n] - ln) * gf.g[n] * l[0] +
                                 (log_deriv[0] - ln) * gf.g[0] * l[n]);
            for (std::size_t j = 1; j < n; ++j)
                acc += (log_deriv[n - j] - ln) * gf.g[n - j] * l[j];
            out[n] += dt * acc;
        }
    });
    return out;
}

}  // namespace

std::vector<complex> driving_samples(const DrivingProtocol& protocol, const TimeGrid& grid) {
    const std::size_t m = grid.size();
    std::vector<complex> l(m);
    if (const auto* c = std::get_if<ConstantDrive>(&protocol)) {
        for (std::size_t k = 0; k < m; ++k) l[k] = c->amplitude;
    } else if (const auto* mono = std::get_if<MonochromaticDrive>(&protocol)) {
        for (std::size_t k = 0; k < m; ++k)
            l[k] = mono->amplitude * std::exp(complex(0.0, -mono->omega_l * grid.t(k)));
    } else if (const auto* pulse = std::get_if<GaussianPulseDrive>(&protocol)) {
        if (!(pulse->width > 0.0))
            throw std::invalid_argument("driving_samples: pulse width must be positive");
        for (std::size_t k = 0; k < m; ++k) {
            const double t = grid.t(k);
            const double arg = (t - pulse->t0) / pulse->width;
            l[k] = pulse->amplitude * std::exp(-0.5 * arg * arg) *
                   std::exp(complex(0.0, -pulse->omega_l * t));
        }
    } else {
        const auto& sampled = std::get<SampledDrive>(protocol);
        if (sampled.values.size() != m)
            throw std::invalid_argument("driving_samples: sample count does not match the grid");
        l = sampled.values;
    }
    return l;
}

std::vector<complex> driven_displacement(const GreenFunction& gf, const std::vector<complex>& l,
                                         unsigned workers) {
    if (l.size() != gf.g.size())
        throw std::invalid_argument("driven_displacement: drive samples do not match the grid");
    return convolve(gf.g, l, gf.grid.dt, workers);
}

std::vector<complex> driven_displacement_dot(const GreenFunction& gf,
                                             const std::vector<complex>& l, unsigned workers) {
    if (l.size() != gf.g.size())
        throw std::invalid_argument(
            "driven_displacement_dot: drive samples do not match the grid");
    std::vector<complex> fdot = convolve(gf.gdot, l, gf.grid.dt, workers);
    for (std::size_t k = 0; k < fdot.size(); ++k) fdot[k] += l[k];  // G(0) = 1 boundary term
    return fdot;
}

std::vector<complex> renormalized_force(const GreenFunction& gf, const std::vector<complex>& l,
                                        unsigned workers) {
    return bracket_convolve(log_derivative(gf), gf, l, workers);
}

std::vector<complex> renormalized_force_rates(const CoefficientSeries& coeffs,
                                              const GreenFunction& gf,
                                              const std::vector<complex>& l, unsigned workers) {
    const std::size_t m = gf.g.size();
    if (coeffs.grid.size() != m || coeffs.grid.dt != gf.grid.dt)
        throw std::invalid_argument(
            "renormalized_force_rates: coefficient and propagator grids disagree");
    std::vector<complex> log_deriv(m);
    for (std::size_t k = 0; k < m; ++k)
        log_deriv[k] = complex(-0.5 * coeffs.gamma[k], -coeffs.omega_r[k]);
    return bracket_convolve(log_deriv, gf, l, workers);
}

StateSeries driven_moments(const GreenFunction& gf, const CoefficientSeries& coeffs,
                           const GaussianModeState& initial, const std::vector<complex>& l,
                           unsigned workers) {
    const std::size_t m = gf.g.size();
    if (coeffs.grid.size() != m)
        throw std::invalid_argument("driven_moments: coefficient and propagator grids disagree");
    validate_state(initial);

    const std::vector<complex> f_drive = driven_displacement(gf, l, workers);

    StateSeries out;
    out.grid = gf.grid;
    out.a.resize(m);
    out.aa.resize(m);
    out.n.resize(m);
    out.entropy.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        const complex g = gf.g[k];
        const complex f_tot = coeffs.F[k] + f_drive[k];
        out.a[k] = g * initial.a + f_tot;
        out.aa[k] = g * g * initial.aa + 2.0 * g * f_tot * initial.a + f_tot * f_tot -
                    coeffs.Jsq[k];
        out.n[k] = std::norm(g) * initial.n + 2.0 * std::real(g * initial.a * std::conj(f_tot)) +
                   std::norm(f_tot) + coeffs.bath_I[k];
        out.entropy[k] =
            von_neumann_entropy(symplectic_nu({out.a[k], out.aa[k], out.n[k]}));
    }
    return out;
}

}  // namespace fano
