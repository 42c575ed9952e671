// Spectral densities of the bosonic environment and the derived frequency-
// domain objects: memory kernel K(t) = \int J(w) e^{-iwt} dw, principal-value
// level shift Delta(w) = P\int J(w')/(w - w') dw', one-sided Fourier-Laplace
// transform K^(-iw) = pi J(w) + i Delta(w), and uniform midpoint-rule
// discretization into a finite mode set.
#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fano/quadrature.hpp"
#include "fano/types.hpp"

namespace fano {

// J(w) = gamma0 / (2 pi) on the whole real axis. Its memory kernel is the
// Dirac distribution gamma0 * delta(t); pointwise kernel evaluation is
// refused and the Green's-function layer special-cases it.
struct FlatSpectralDensity {
    double gamma0{0.0};
};

// J(w) = (gamma0 / 2 pi) * eta^2 / ((w_c - w)^2 + eta^2).
struct LorentzianSpectralDensity {
    double gamma0{0.0};
    double eta{0.0};
    double omega_c{0.0};
};

struct DiscreteMode {
    double omega{0.0};
    complex g{0.0, 0.0};
};

// Finite sum J(w) = sum_j |g_j|^2 delta(w - w_j), kept as the mode list.
struct DiscreteSumSpectralDensity {
    std::vector<DiscreteMode> modes;
};

// Samples (w_k, J_k) on a strictly increasing grid; J = 0 outside the grid.
// interpolation_order: 1 = piecewise linear, 3 = natural cubic spline.
struct TabulatedSpectralDensity {
    std::vector<double> omega;
    std::vector<double> j;
    int interpolation_order{1};
};

using SpectralDensity = std::variant<FlatSpectralDensity, LorentzianSpectralDensity,
                                     DiscreteSumSpectralDensity, TabulatedSpectralDensity>;

// Frequency-window convention for continuum integrals: [0, omega_max] by
// default, or [-omega_max, omega_max] when use_full_real_axis is set (the
// convention under which the Lorentzian closed forms are exact).
struct FrequencyCutoff {
    double omega_max{0.0};
    bool use_full_real_axis{false};
};

// Pointwise J(w). DiscreteSum has no density and throws.
double evaluate(const SpectralDensity& J, double omega);

// Total weight sum_j |g_j|^2 for a discrete set; \int J dw otherwise (used by
// the reaction-coordinate mapping and kernel normalization checks).
double integrated_weight(const SpectralDensity& J, const FrequencyCutoff& cutoff);

// K(t). Closed form for the full-axis Lorentzian, finite sum for DiscreteSum,
// adaptive oscillatory quadrature otherwise. Flat throws (Dirac kernel).
complex memory_kernel(const SpectralDensity& J, double t, const FrequencyCutoff& cutoff);

// Delta(w). Closed form for the full-axis Lorentzian; 0 for Flat (whole-axis
// symmetric); PV quadrature for Lorentzian half-axis and Tabulated;
// DiscreteSum throws (continuum-only operation). For Tabulated input, w at a
// grid edge is an error (the difference-quotient regularization needs an
// interior point).
double lamb_shift(const SpectralDensity& J, double omega, const FrequencyCutoff& cutoff);

// K^(-iw) = pi J(w) + i Delta(w).
complex kernel_laplace(const SpectralDensity& J, double omega, const FrequencyCutoff& cutoff);

// Uniform midpoint-rule discretization over the cutoff window: N modes at
// panel midpoints with g_j = sqrt(J(w_j) dw). Errors on DiscreteSum input.
DiscreteSumSpectralDensity discretize(const SpectralDensity& J, std::size_t n_modes,
                                      const FrequencyCutoff& cutoff);

// Smallest spacing recurrence estimate t_rec = 2 pi / min dw of a mode set.
double recurrence_time(const DiscreteSumSpectralDensity& modes);

// Two-column (omega, J) CSV loader; '#' comment lines ignored.
TabulatedSpectralDensity load_tabulated_csv(const std::string& path, int interpolation_order = 1);

const char* variant_name(const SpectralDensity& J);

}  // namespace fano
