#pragma once

#include <vector>

#include "fano/coefficients.hpp"
#include "fano/green.hpp"
#include "fano/types.hpp"

namespace fano {

// Gaussian state of the reduced mode: first moment <a>, anomalous moment
// <aa>, occupation <a^dag a>.  Entropy and positivity are functions of the
// central moments m = n - |<a>|^2, p = <aa> - <a>^2 through the symplectic
// eigenvalue nu = sqrt((m + 1/2)^2 - |p|^2) >= 1/2.
struct GaussianModeState {
    complex a{0.0, 0.0};
    complex aa{0.0, 0.0};
    double n{0.0};
};

double symplectic_nu(const GaussianModeState& s);

// Throws if nu < 1/2 - 1e-9 (not a physical Gaussian state).
void validate_state(const GaussianModeState& s);

// S(nu) = (nu + 1/2) ln(nu + 1/2) - (nu - 1/2) ln(nu - 1/2); the pure-state
// limit nu -> 1/2 is taken continuously (S -> 0).
double von_neumann_entropy(double nu);

struct StateSeries {
    TimeGrid grid;
    std::vector<complex> a;
    std::vector<complex> aa;
    std::vector<double> n;
    std::vector<double> entropy;
};

// Exact propagation through the solved equations of motion:
//   <a>(t)  = G <a>_0 + F
//   <aa>(t) = G^2 <aa>_0 + 2 G F <a>_0 + F^2 - J_sq
//   n(t)    = |G|^2 n_0 + 2 Re{G <a>_0 conj(F)} + |F|^2 + I
StateSeries propagate_closed_form(const GreenFunction& gf, const CoefficientSeries& coeffs,
                                  const GaussianModeState& initial);

// Same trajectory through the time-local master equation,
//   d<a>/dt  = (-i w_r - gamma/2) <a> + f
//   d<aa>/dt = (-2 i w_r - gamma) <aa> + 2 f <a> - delta
//   dn/dt    = -gamma n + (gamma N) + 2 Re{f conj<a>}
// integrated with RK4 on the coefficient grid (linear interpolation at half
// steps, `substeps` internal steps per grid step).  If the integration blows
// up it is retried with doubled substeps, up to eight doublings.
StateSeries propagate_ode(const CoefficientSeries& coeffs, const GaussianModeState& initial,
                          std::size_t substeps = 1);

}  // namespace fano
