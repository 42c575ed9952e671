#pragma once

#include <variant>
#include <vector>

#include "fano/coefficients.hpp"
#include "fano/dynamics.hpp"
#include "fano/green.hpp"
#include "fano/types.hpp"

namespace fano {

// Linear (displacement-type) drive l(t) on the central mode.  Only linear
// driving exists here: the shared-propagator trick behind the closed forms
// breaks for quadratic protocols, so no such protocol type is provided.
struct ConstantDrive {
    complex amplitude{0.0, 0.0};
};

// l(t) = amplitude * e^{-i omega_l t}
struct MonochromaticDrive {
    complex amplitude{0.0, 0.0};
    double omega_l{0.0};
};

// l(t) = amplitude * e^{-(t-t0)^2 / (2 width^2)} e^{-i omega_l t}
struct GaussianPulseDrive {
    complex amplitude{0.0, 0.0};
    double t0{0.0};
    double width{1.0};
    double omega_l{0.0};
};

// Samples on the propagation grid itself (one value per node).
struct SampledDrive {
    std::vector<complex> values;
};

using DrivingProtocol =
    std::variant<ConstantDrive, MonochromaticDrive, GaussianPulseDrive, SampledDrive>;

std::vector<complex> driving_samples(const DrivingProtocol& protocol, const TimeGrid& grid);

// F(t) = \int_0^t G(t-s) l(s) ds and its derivative F'(t) = l(t) +
// \int_0^t G'(t-s) l(s) ds, by product-trapezoidal convolution (each output
// node is an independent sum, parallelized over nodes).
std::vector<complex> driven_displacement(const GreenFunction& gf, const std::vector<complex>& l,
                                         unsigned workers = 0);
std::vector<complex> driven_displacement_dot(const GreenFunction& gf,
                                             const std::vector<complex>& l,
                                             unsigned workers = 0);

// Renormalized driving force f_r(t) = l(t) +
// \int_0^t [L(t-s) - L(t)] G(t-s) l(s) ds with L = G'/G taken pointwise from
// the propagator (errors at zeros of G propagate from log_derivative).
std::vector<complex> renormalized_force(const GreenFunction& gf, const std::vector<complex>& l,
                                        unsigned workers = 0);

// Same force through the assembled (omega_r, gamma) series instead of the raw
// log-derivative: L is reassembled as -gamma/2 - i omega_r.  Exists as an
// independent code path for consistency checking.
std::vector<complex> renormalized_force_rates(const CoefficientSeries& coeffs,
                                              const GreenFunction& gf,
                                              const std::vector<complex>& l,
                                              unsigned workers = 0);

// Closed-form driven moments: <a> = G<a>_0 + F_tot, with F_tot the sum of the
// bath displacement response already inside coeffs and the drive convolution;
// second moments follow the same closed forms as the undriven case.
StateSeries driven_moments(const GreenFunction& gf, const CoefficientSeries& coeffs,
                           const GaussianModeState& initial, const std::vector<complex>& l,
                           unsigned workers = 0);

}  // namespace fano
