#include "fano/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace fano {

namespace {

// 15-point Kronrod nodes/weights on [-1, 1] with the embedded 7-point Gauss
// rule (abscissae symmetric; listed for x >= 0). Standard QUADPACK constants.
constexpr double kronrod_x[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kronrod_w[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

// Gauss weights attach to the odd-indexed Kronrod abscissae.
constexpr double gauss_w[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelEstimate {
    complex value;
    double error;
};

PanelEstimate gk15(const std::function<complex(double)>& f, double a, double b,
                   std::size_t& evaluations) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);

    complex kronrod_sum{0.0, 0.0};
    complex gauss_sum{0.0, 0.0};

    for (int i = 0; i < 8; ++i) {
        const double dx = half * kronrod_x[i];
        complex fsum;
        if (i == 7) {
            fsum = f(mid);
            ++evaluations;
        } else {
            fsum = f(mid - dx) + f(mid + dx);
            evaluations += 2;
        }
        kronrod_sum += kronrod_w[i] * fsum;
        if (i % 2 == 1) gauss_sum += gauss_w[i / 2] * fsum;
    }

    PanelEstimate est;
    est.value = kronrod_sum * half;
    const complex gauss_value = gauss_sum * half;
    // QUADPACK-style sharpened error estimate
    const double diff = std::abs(est.value - gauss_value);
    est.error = diff;
    if (diff > 0.0) {
        const double scale = std::pow(200.0 * diff, 1.5);
        est.error = std::min(diff, scale);
    }
    return est;
}

struct Panel {
    double a, b;
    complex value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

}  // namespace

QuadratureResult integrate(const std::function<complex(double)>& f, double a, double b,
                           const QuadratureOptions& opts) {
    QuadratureResult result;
    if (a == b) {
        result.converged = true;
        return result;
    }
    const int seeds = std::max(1, opts.initial_panels);

    std::priority_queue<Panel> panels;
    complex total{0.0, 0.0};
    double total_error = 0.0;
    for (int i = 0; i < seeds; ++i) {
        const double pa = a + (b - a) * static_cast<double>(i) / seeds;
        const double pb = a + (b - a) * static_cast<double>(i + 1) / seeds;
        const PanelEstimate est = gk15(f, pa, pb, result.evaluations);
        panels.push(Panel{pa, pb, est.value, est.error});
        total += est.value;
        total_error += est.error;
    }

    int subdivisions = 0;
    while (subdivisions < opts.max_subdivisions) {
        const double tol = std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
        if (total_error <= tol) break;
        Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // Panel no longer representable in double precision; keep its
            // estimate and stop refining it.
            panels.push(Panel{worst.a, worst.b, worst.value, 0.0});
            total_error -= worst.error;
            continue;
        }
        const PanelEstimate left = gk15(f, worst.a, mid, result.evaluations);
        const PanelEstimate right = gk15(f, mid, worst.b, result.evaluations);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        panels.push(Panel{worst.a, mid, left.value, left.error});
        panels.push(Panel{mid, worst.b, right.value, right.error});
        ++subdivisions;
    }

    result.value = total;
    result.error_estimate = total_error;
    result.converged =
        total_error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
    return result;
}

QuadratureResult integrate_oscillatory(const std::function<complex(double)>& f, double a, double b,
                                       double omega_scale, QuadratureOptions opts) {
    const double cycles = std::abs(omega_scale) * std::abs(b - a) / (2.0 * M_PI);
    const int want = static_cast<int>(std::ceil(cycles)) + 1;
    opts.initial_panels = std::clamp(std::max(opts.initial_panels, want), 1, 4096);
    return integrate(f, a, b, opts);
}

QuadratureResult principal_value(const std::function<complex(double)>& f, double a, double b,
                                 double c, const QuadratureOptions& opts) {
    if (!(a < c && c < b))
        throw std::invalid_argument("principal_value: singularity must lie strictly inside [a, b]");
    const complex fc = f(c);
    auto regularized = [&](double w) -> complex {
        const double d = w - c;
        if (d == 0.0) return complex{0.0, 0.0};  // measure-zero; panels split at c anyway
        return (f(w) - fc) / d;
    };
    // Splitting at the singularity keeps the (strictly interior) Kronrod nodes
    // away from w = c.
    QuadratureResult left = integrate(regularized, a, c, opts);
    QuadratureResult right = integrate(regularized, c, b, opts);
    QuadratureResult result;
    result.value = left.value + right.value + fc * std::log((b - c) / (c - a));
    result.error_estimate = left.error_estimate + right.error_estimate;
    result.converged = left.converged && right.converged;
    result.evaluations = left.evaluations + right.evaluations;
    return result;
}

}  // namespace fano
