#pragma once

#include <cstdint>
#include <vector>

#include "fano/coefficients.hpp"
#include "fano/dynamics.hpp"
#include "fano/types.hpp"

namespace fano {

// First-law ledger along a trajectory.  Work is the cumulative product
// trapezoid of (omega_r_dot n - 2 Im{f_dot conj<a>}) with midpoint discrete
// derivatives, internal energy is U = omega_r n - 2 Im{f conj<a>}, and heat
// closes the first law exactly: Q = dU - W.  The in/out split rates
// (omega_r gamma N, omega_r gamma n) are reported at the nodes; their
// trapezoid integral reproduces Q in the thermal case up to O(dt^2).
struct ThermoSeries {
    TimeGrid grid;
    std::vector<double> U;
    std::vector<double> W;
    std::vector<double> Q;
    std::vector<double> Qdot_in;
    std::vector<double> Qdot_out;
    std::vector<double> beta_r;  // NaN where undefined
    std::vector<std::uint8_t> beta_r_defined;
    std::vector<double> S;
    std::vector<double> Sigma;  // cumulative trapezoid of sigma over covered steps
    std::vector<double> sigma;  // NaN where undefined
    std::vector<std::uint8_t> sigma_defined;
    double beta_r_coverage{0.0};  // fraction of samples with beta_r defined
    double sigma_coverage{0.0};   // fraction of steps entering Sigma
};

ThermoSeries build_thermo(const CoefficientSeries& coeffs, const StateSeries& states);

// Right-hand sides of the moment equations evaluated on the instantaneous
// renormalized Gibbs data (<a>, <aa>, n) = (0, 0, N(t)): the residual triple
// is (|f|, |delta|, |gamma N - gamma (gamma N / gamma)|) and vanishes
// identically in the thermal case.
struct FixedPointResidual {
    double r_a{0.0};
    double r_aa{0.0};
    double r_n{0.0};
    bool defined{false};  // false where N is undefined
};

FixedPointResidual gibbs_fixed_point_residual(const CoefficientSeries& coeffs,
                                              std::size_t sample);

}  // namespace fano
