#pragma once

#include <vector>

#include "fano/spectral.hpp"
#include "fano/types.hpp"

namespace fano {

// Reduced-mode propagator G(t) (G(0) = 1) and its time derivative on a
// uniform grid.  All of the exact reduced dynamics is a functional of this
// single complex function.
struct GreenFunction {
    TimeGrid grid;
    std::vector<complex> g;
    std::vector<complex> gdot;
};

// Decay/oscillation exponents of the closed-form Lorentzian propagator:
// the roots of mu^2 + (eta - i Delta) mu + gamma0 eta / 2 = 0 with
// Delta = omega0 - omega_c.  "slow" is the root with the larger real part;
// it dominates at late times.
struct LorentzianRoots {
    complex mu1;
    complex mu2;
    bool degenerate;
    complex mu_slow;
};

LorentzianRoots lorentzian_roots(const LorentzianSpectralDensity& J, double omega0);

// Late-time frequency shift and decay rate of the Lorentzian propagator,
// omega_r_bar = omega0 - Im mu_slow, gamma_bar = -2 Re mu_slow.
struct AsymptoticRates {
    double omega_r_bar;
    double gamma_bar;
};

AsymptoticRates lorentzian_asymptotic_rates(const LorentzianSpectralDensity& J, double omega0);

// Exponential propagator of the flat (frequency-independent) density over the
// whole real axis: G = exp(-i omega0 t - gamma0 t / 2).
GreenFunction green_flat(double gamma0, double omega0, const TimeGrid& grid);

// Two-exponential closed form for the Lorentzian density over the whole real
// axis, with the confluent (double-root) limit handled explicitly.
GreenFunction green_lorentzian_closed(const LorentzianSpectralDensity& J, double omega0,
                                      const TimeGrid& grid);

// Product-trapezoidal solution of
//   dG/dt + i omega0 G + int_0^t K(t - tau) G(tau) dtau = 0,   G(0) = 1,
// carried out in the frame rotating at omega0 so the step error is set by the
// memory kernel's envelope rather than by the bare mode frequency.
GreenFunction solve_volterra(const SpectralDensity& J, double omega0, const TimeGrid& grid,
                             const FrequencyCutoff& cutoff);

// Boundary value of the Laplace transform, Ghat(-i omega) =
// 1 / (i (omega0 + shift(omega) - omega) + pi J(omega)).
complex green_laplace(const SpectralDensity& J, double omega0, double omega,
                      const FrequencyCutoff& cutoff);

// Weak-coupling propagator with couplings scaled by lambda: the exact
// log-derivative is replaced by its second-order cumulant
//   d/dt log G = -i omega0 - lambda^2 int_0^t K(s) e^{i omega0 s} ds.
struct SecondOrderSeries {
    TimeGrid grid;
    std::vector<complex> g;
    std::vector<complex> log_deriv;
};

SecondOrderSeries green_second_order(const SpectralDensity& J, double lambda, double omega0,
                                     const TimeGrid& grid, const FrequencyCutoff& cutoff);

// Gdot/G on the grid.  The ratio is undefined where G vanishes; a sample with
// |G| < 1e-10 raises an error naming the first offending time.
std::vector<complex> log_derivative(const GreenFunction& gf);

}  // namespace fano
