#pragma once

#include <vector>

#include "fano/coefficients.hpp"
#include "fano/green.hpp"
#include "fano/spectral.hpp"
#include "fano/types.hpp"

namespace fano {

// Equilibrium steady state of the thermal problem.  n_bar is the frequency
// integral of J(w) n_B(w) |G^(-iw)|^2 over the cutoff window; the same
// integral without n_B is the normalization check (equal to 1 when every
// pole of G^ decays).  X = ln((1+n_bar)/n_bar) and beta_r_bar := X /
// omega_r_bar, so the asymptotic Planck inversion is exact by construction.
struct SteadyState {
    double n_bar{0.0};
    double X{0.0};
    double omega_r_bar{0.0};
    double gamma_bar{0.0};
    double beta_r_bar{0.0};
    double normalization{0.0};
    bool converged{false};
};

// Continuum J only (DiscreteSum throws).  At beta = inf the bath is in its
// ground state and every mode occupation vanishes, so n_bar = 0 exactly and
// X, beta_r_bar are +inf; the negative-frequency branch of the full-axis
// convention is a finite-temperature bookkeeping device and its zero-
// temperature limit is taken inside the integral.  A half-axis window with
// J(0) > 0 at finite beta makes the integral log-divergent at w = 0 and is
// refused; use the full-axis window, where the w <-> -w pairing is finite.
SteadyState steady_excitation(const SpectralDensity& J, double omega0, double beta,
                              const FrequencyCutoff& cutoff);

// Root of omega0 + Delta(w) - w on [lo, hi] by bisection (requires a sign
// change on the bracket).
double resonance_frequency(const SpectralDensity& J, double omega0,
                           const FrequencyCutoff& cutoff, double lo, double hi);

// Asymptotic displacement weights phi_j = alpha_j g_j G^(-i w_j).
std::vector<complex> ness_displacement_weights(const SpectralDensity& J, double omega0,
                                               const FrequencyCutoff& cutoff,
                                               const std::vector<DisplacedBathMode>& modes);

// F-bar(t) = -i sum_j phi_j e^{-i w_j t} and the matching force
// f-bar(t) = sum_j [omega_r_bar - w_j - (i/2) gamma_bar] phi_j e^{-i w_j t}.
complex ness_displacement(const std::vector<DisplacedBathMode>& modes,
                          const std::vector<complex>& phi, double t);
complex ness_force(const std::vector<DisplacedBathMode>& modes,
                   const std::vector<complex>& phi, const SteadyState& steady, double t);

// Constant fluxes for exactly one displaced mode:
//   U_bar   = omega_r_bar (n_bar - |phi|^2) + 2 w_d |phi|^2
//   Wdot    = +gamma_bar w_d |phi|^2,  Qdot = -Wdot
//   sigmadot = beta_r_bar gamma_bar w_d |phi|^2  >= 0
// sigmadot is evaluated both from phi and from the explicit
// |alpha|^2 |g|^2 |G^|^2 chain; disagreement is an internal error.
struct NessFluxes {
    complex phi{0.0, 0.0};
    double U_bar{0.0};
    double Qdot{0.0};
    double Wdot{0.0};
    double sigmadot{0.0};
};

NessFluxes ness_fluxes_single_mode(const SpectralDensity& J, double omega0,
                                   const FrequencyCutoff& cutoff, const SteadyState& steady,
                                   const DisplacedBathMode& mode);

// Sup-norm residuals of the long-time moment equations on the asymptotic
// series: first moment dF/dt = -(i omega_r_bar + gamma_bar/2) F + f, plus the
// <aa> and <a^dag a> analogues with <a> = F, <<aa>> = 0, <<a^dag a>> = n_bar.
struct NessResiduals {
    double first_moment{0.0};
    double anomalous{0.0};
    double occupation{0.0};
};

NessResiduals verify_ness_unitarity(const SteadyState& steady,
                                    const std::vector<DisplacedBathMode>& modes,
                                    const std::vector<complex>& phi,
                                    const std::vector<double>& times);

// sigmadot as a function of the displaced-mode frequency at fixed |alpha|
// and |g| (the entropy-production resonance profile).
struct SweepPoint {
    double omega_d{0.0};
    double sigmadot{0.0};
};

std::vector<SweepPoint> ness_resonance_sweep(const SpectralDensity& J, double omega0,
                                             const FrequencyCutoff& cutoff,
                                             const SteadyState& steady, double g_mag,
                                             double alpha_mag,
                                             const std::vector<double>& omega_d_grid);

}  // namespace fano
