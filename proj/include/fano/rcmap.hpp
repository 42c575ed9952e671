#pragma once

#include <array>
#include <vector>

#include "fano/dynamics.hpp"
#include "fano/spectral.hpp"
#include "fano/types.hpp"

namespace fano {

// Reaction-coordinate extraction of the Lorentzian bath: one auxiliary mode
// at the spectral-density peak carrying the whole coupling weight, damped by
// a residual flat bath.  The residual Lindblad rates are completed with
// detailed balance at (omega_rc, beta); the mapping itself fixes only their
// difference W_minus - W_plus = gamma0_residual.
struct RcModel {
    double g{0.0};               // |g|^2 = gamma0 eta / 2
    double omega_rc{0.0};        // = omega_c
    double gamma0_residual{0.0}; // = 2 eta
    double W_plus{0.0};
    double W_minus{0.0};
    double beta{0.0};
};

RcModel map_lorentzian(const LorentzianSpectralDensity& J, double beta);

// Variant-checked entry: anything but a Lorentzian is refused.
RcModel map_spectral_density(const SpectralDensity& J, double beta);

// Joint Gaussian moments of central mode a and reaction coordinate b.
struct RcState {
    complex a{0.0, 0.0};
    complex b{0.0, 0.0};
    complex aa{0.0, 0.0};
    complex bb{0.0, 0.0};
    complex ab{0.0, 0.0};
    complex adb{0.0, 0.0};  // <a^dag b>
    double na{0.0};
    double nb{0.0};
};

struct RcSeries {
    TimeGrid grid;
    std::vector<RcState> joint;
    StateSeries central;  // marginal of mode a
};

// Thermal reaction-coordinate preparation at the model temperature.
RcState rc_initial_state(const RcModel& model, const GaussianModeState& central);

// Two-mode moment propagation under H = omega0 a^dag a + omega_rc b^dag b +
// g (a^dag b + a b^dag) with the thermal dissipator acting on b.  RK4 with
// halve-and-retry on divergence.
RcSeries simulate_rc(const RcModel& model, double omega0, const RcState& initial,
                     const TimeGrid& grid, unsigned substeps = 1);

// Symplectic eigenvalues (nu1 >= nu2) of the joint 4x4 covariance; physical
// states have both >= 1/2.
std::array<double, 2> rc_symplectic_eigenvalues(const RcState& state);

// Sup and L2 deviations of the central-mode moments between two routes.
struct MomentDeviation {
    double max_a{0.0};
    double max_aa{0.0};
    double max_n{0.0};
    double l2_a{0.0};
    double l2_aa{0.0};
    double l2_n{0.0};
};

MomentDeviation moment_deviation(const StateSeries& reference, const StateSeries& other);

}  // namespace fano
