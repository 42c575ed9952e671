// Adaptive Gauss-Kronrod (G7/K15) quadrature over real or complex integrands,
// with oscillatory panel seeding and a subtract-the-singularity principal
// value rule. Deterministic: panel subdivision depends only on the integrand
// values, never on timing or iteration order.
#pragma once

#include <functional>

#include "fano/types.hpp"

namespace fano {

struct QuadratureOptions {
    double abs_tol{1e-10};
    double rel_tol{1e-10};
    int max_subdivisions{2000};
    // Initial number of equal panels; callers integrating e^{-i w t}-type
    // factors should seed proportional to |w|*(b-a) so each panel sees O(1)
    // oscillations before adaptivity takes over.
    int initial_panels{1};
};

struct QuadratureResult {
    complex value{0.0, 0.0};
    double error_estimate{0.0};
    bool converged{false};
    std::size_t evaluations{0};
};

// Adaptive integration of f over [a, b].
QuadratureResult integrate(const std::function<complex(double)>& f, double a, double b,
                           const QuadratureOptions& opts = {});

// Convenience: seeds initial panels for an integrand containing a phase factor
// of angular rate |omega_scale| across [a, b].
QuadratureResult integrate_oscillatory(const std::function<complex(double)>& f, double a, double b,
                                       double omega_scale, QuadratureOptions opts = {});

// Cauchy principal value of \int_a^b f(w) / (w - c) dw for a < c < b, by
// subtracting the singularity: the regularized difference quotient
// (f(w) - f(c))/(w - c) is integrated adaptively and the removed part
// contributes f(c) * ln((b - c)/(c - a)) exactly.
QuadratureResult principal_value(const std::function<complex(double)>& f, double a, double b,
                                 double c, const QuadratureOptions& opts = {});

}  // namespace fano
