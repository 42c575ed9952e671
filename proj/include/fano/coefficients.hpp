#pragma once

#include <cstdint>
#include <vector>

#include "fano/green.hpp"
#include "fano/spectral.hpp"
#include "fano/types.hpp"

namespace fano {

// Environment preparation on top of a thermal bath at inverse temperature
// beta: selected modes may carry a coherent displacement alpha or an anomalous
// second moment <<bb>>.  Such modes are single points of the continuum, so
// they drive the reduced mode (through F and J_sq) without altering the
// memory kernel.
struct DisplacedBathMode {
    double omega{0.0};
    complex g{0.0, 0.0};
    complex alpha{0.0, 0.0};
};

struct SqueezedBathMode {
    double omega{0.0};
    complex g{0.0, 0.0};
    complex cc{0.0, 0.0};  // <<b b>>, bounded by sqrt(n(n+1)) at occupation n
};

struct EnvironmentState {
    double beta{0.0};  // may be +inf (zero temperature)
    std::vector<DisplacedBathMode> displaced;
    std::vector<SqueezedBathMode> squeezed;
};

void validate_environment(const EnvironmentState& env);

// Frequency shift and decay rate read off the propagator,
// omega_r = -Im Gdot/G, gamma = -2 Re Gdot/G.
struct FrequencyShiftSeries {
    std::vector<double> omega_r;
    std::vector<double> gamma;
};

FrequencyShiftSeries omega_gamma(const GreenFunction& gf);

// Thermal noise integral I(t) = int J(w) n_B(w) |c_w(t)|^2 dw with
// c_w(t) = int_0^t G(t - tau) e^{-i w tau} dtau, plus its exact derivative
// Idot(t) = 2 int J n_B Re{conj(c_w) G(t)} e^{i w t}... accumulated
// incrementally, O(n_omega * steps) overall.
//
// Full-real-axis windows use a symmetric midpoint grid straddling w = 0, so
// the thermal 1/(beta w) singularity cancels pairwise and the result is the
// principal-value extension.  Positive-axis windows with J(0) > 0 at finite
// temperature are infrared-divergent; the flag below then reports that the
// returned numbers are a cutoff-limited estimate that cannot converge under
// grid refinement.
struct NoiseSeries {
    std::vector<double> I;
    std::vector<double> Idot;
    bool infrared_convergent{true};
};

NoiseSeries noise_integral(const SpectralDensity& J, const FrequencyCutoff& cutoff, double beta,
                           const GreenFunction& gf, std::size_t n_omega, unsigned workers = 0);

// Displacement response F(t) = -i sum_k g_k alpha_k c_k(t) and its exact
// derivative, using cdot_k = G - i w_k c_k.
struct ForceSeries {
    std::vector<complex> F;
    std::vector<complex> Fdot;
};

ForceSeries displacement_response(const GreenFunction& gf,
                                  const std::vector<DisplacedBathMode>& modes);

// Anomalous response J_sq(t) = sum_k g_k^2 <<b_k b_k>> c_k(t)^2 and its exact
// derivative.
struct SqueezeSeries {
    std::vector<complex> Jsq;
    std::vector<complex> Jsq_dot;
};

SqueezeSeries squeeze_response(const GreenFunction& gf,
                               const std::vector<SqueezedBathMode>& modes);

// The complete time-local generator data on the propagator's grid.  N(t) is
// reported through gamma_N = gamma I + Idot, which stays finite at the zeros
// of gamma; N itself carries a defined-flag (|gamma| >= 1e-9).
struct CoefficientSeries {
    TimeGrid grid;
    std::vector<double> omega_r;
    std::vector<double> gamma;
    std::vector<double> bath_I;
    std::vector<double> gamma_N;
    std::vector<double> N;  // NaN where undefined
    std::vector<std::uint8_t> N_defined;
    std::vector<complex> F;
    std::vector<complex> f;  // Fdot - (Gdot/G) F
    std::vector<complex> Jsq;
    std::vector<complex> delta;  // Jsq_dot - 2 (Gdot/G) Jsq
    bool infrared_convergent{true};
};

CoefficientSeries build_coefficients(const SpectralDensity& J, const FrequencyCutoff& cutoff,
                                     const EnvironmentState& env, const GreenFunction& gf,
                                     std::size_t n_omega, unsigned workers = 0);

// Weak-coupling (second-order) stationary rates at coupling scale lambda:
// omega_r = omega0 + lambda^2 shift(omega0), gamma = 2 pi lambda^2 J(omega0).
struct MarkovRates {
    double omega_r;
    double gamma;
};

MarkovRates markov_limit(const SpectralDensity& J, double lambda, double omega0,
                         const FrequencyCutoff& cutoff);

// Time-dependent second-order rates for the Lorentzian density in closed
// form (whole real axis).
MarkovRates second_order_lorentzian_rates(const LorentzianSpectralDensity& J, double lambda,
                                          double omega0, double t);

// Mean-field limit of the displacement response: couplings scaled to zero at
// fixed g_k * alpha_k.  F_cl uses the free propagator e^{-i omega0 t}; the
// renormalized force collapses to the bare bath drive
// f_cl = -i sum_k g_k alpha_k e^{-i w_k t}.
struct ClassicalForceSeries {
    std::vector<complex> F;
    std::vector<complex> f;
};

ClassicalForceSeries classical_force(const std::vector<DisplacedBathMode>& modes, double omega0,
                                     const TimeGrid& grid);

}  // namespace fano
