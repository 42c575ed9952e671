#include "fano/rcmap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace fano {

namespace {

RcState operator*(double s, const RcState& x) {
    RcState y;
    y.a = s * x.a;
    y.b = s * x.b;
    y.aa = s * x.aa;
    y.bb = s * x.bb;
    y.ab = s * x.ab;
    y.adb = s * x.adb;
    y.na = s * x.na;
    y.nb = s * x.nb;
    return y;
}

RcState operator+(const RcState& x, const RcState& y) {
    RcState z;
    z.a = x.a + y.a;
    z.b = x.b + y.b;
    z.aa = x.aa + y.aa;
    z.bb = x.bb + y.bb;
    z.ab = x.ab + y.ab;
    z.adb = x.adb + y.adb;
    z.na = x.na + y.na;
    z.nb = x.nb + y.nb;
    return z;
}

RcState rhs(const RcModel& m, double omega0, const RcState& s) {
    const complex i_unit(0.0, 1.0);
    const double g = m.g;
    const double gt = m.gamma0_residual;
    const complex la(0.0, -omega0);                 // free rotation of a
    const complex lb(-0.5 * gt, -m.omega_rc);       // damped rotation of b
    RcState d;
    d.a = la * s.a - i_unit * g * s.b;
    d.b = lb * s.b - i_unit * g * s.a;
    d.na = 2.0 * g * std::imag(s.adb);
    d.nb = -2.0 * g * std::imag(s.adb) - gt * s.nb + m.W_plus;
    d.adb = (complex(0.0, omega0 - m.omega_rc) - 0.5 * gt) * s.adb +
            i_unit * g * (s.nb - s.na);
    d.aa = 2.0 * la * s.aa - 2.0 * i_unit * g * s.ab;
    d.bb = 2.0 * lb * s.bb - 2.0 * i_unit * g * s.ab;
    d.ab = (la + lb) * s.ab - i_unit * g * (s.aa + s.bb);
    return d;
}

bool bad(const RcState& s) {
    const double cap = 1e12;
    auto ok_c = [cap](complex z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag()) && std::abs(z) < cap;
    };
    auto ok_r = [cap](double x) { return std::isfinite(x) && std::abs(x) < cap; };
    return !(ok_c(s.a) && ok_c(s.b) && ok_c(s.aa) && ok_c(s.bb) && ok_c(s.ab) &&
             ok_c(s.adb) && ok_r(s.na) && ok_r(s.nb));
}

}  // namespace

RcModel map_lorentzian(const LorentzianSpectralDensity& J, double beta) {
    if (!(J.gamma0 > 0.0) || !(J.eta > 0.0))
        throw std::invalid_argument("map_lorentzian: gamma0 and eta must be positive");
    if (!(J.omega_c > 0.0))
        throw std::invalid_argument(
            "map_lorentzian: the reaction coordinate inherits the peak frequency, which must "
            "be positive for a thermal residual bath");
    if (!(beta > 0.0)) throw std::invalid_argument("map_lorentzian: beta must be positive");

    RcModel m;
    m.g = std::sqrt(0.5 * J.gamma0 * J.eta);
    m.omega_rc = J.omega_c;
    m.gamma0_residual = 2.0 * J.eta;
    m.beta = beta;
    const double nb = bose_occupation(m.omega_rc, beta);
    m.W_plus = m.gamma0_residual * nb;
    m.W_minus = m.gamma0_residual * (nb + 1.0);
    // The mapping constrains only the difference of the rates; detailed
    // balance fixed the rest, so the constraint must come out exact.
    if (std::abs((m.W_minus - m.W_plus) - m.gamma0_residual) >
        1e-12 * std::max(1.0, m.gamma0_residual))
        throw std::runtime_error("map_lorentzian: rate-difference constraint violated");
    return m;
}

RcModel map_spectral_density(const SpectralDensity& J, double beta) {
    const auto* lor = std::get_if<LorentzianSpectralDensity>(&J);
    if (!lor)
        throw std::invalid_argument(
            std::string("reaction-coordinate mapping is defined for the lorentzian spectral "
                        "density, got ") +
            variant_name(J));
    return map_lorentzian(*lor, beta);
}

RcState rc_initial_state(const RcModel& model, const GaussianModeState& central) {
    validate_state(central);
    RcState s;
    s.a = central.a;
    s.aa = central.aa;
    s.na = central.n;
    s.nb = std::isinf(model.beta) ? 0.0 : bose_occupation(model.omega_rc, model.beta);
    return s;
}

RcSeries simulate_rc(const RcModel& model, double omega0, const RcState& initial,
                     const TimeGrid& grid, unsigned substeps) {
    if (substeps == 0) throw std::invalid_argument("simulate_rc: substeps must be >= 1");

    for (unsigned attempt = 0;; ++attempt) {
        const unsigned sub = substeps << attempt;
        const double h = grid.dt / double(sub);
        RcSeries out;
        out.grid = grid;
        out.joint.resize(grid.size());
        out.joint[0] = initial;
        bool diverged = false;

        RcState s = initial;
        for (std::size_t k = 1; k < grid.size() && !diverged; ++k) {
            for (unsigned j = 0; j < sub; ++j) {
                const RcState k1 = rhs(model, omega0, s);
                const RcState k2 = rhs(model, omega0, s + 0.5 * h * k1);
                const RcState k3 = rhs(model, omega0, s + 0.5 * h * k2);
                const RcState k4 = rhs(model, omega0, s + h * k3);
                s = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                if (bad(s)) {
                    diverged = true;
                    break;
                }
            }
            out.joint[k] = s;
        }
        if (diverged) {
            if (attempt >= 8)
                throw std::runtime_error(
                    "simulate_rc: propagation diverged even after repeated step halving");
            continue;
        }

        out.central.grid = grid;
        out.central.a.resize(grid.size());
        out.central.aa.resize(grid.size());
        out.central.n.resize(grid.size());
        out.central.entropy.resize(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k) {
            out.central.a[k] = out.joint[k].a;
            out.central.aa[k] = out.joint[k].aa;
            out.central.n[k] = out.joint[k].na;
            out.central.entropy[k] = von_neumann_entropy(
                symplectic_nu({out.joint[k].a, out.joint[k].aa, out.joint[k].na}));
        }
        return out;
    }
}

std::array<double, 2> rc_symplectic_eigenvalues(const RcState& state) {
    // Central (cumulant) second moments.
    const complex m11 = state.aa - state.a * state.a;
    const complex m22 = state.bb - state.b * state.b;
    const complex m12 = state.ab - state.a * state.b;
    const double k11 = state.na - std::norm(state.a);
    const double k22 = state.nb - std::norm(state.b);
    const complex k12 = state.adb - std::conj(state.a) * state.b;

    // Quadrature covariance, ordering (x_a, p_a, x_b, p_b).
    double sig[4][4];
    auto fill_block = [&](int i, int j, complex m, complex k, double delta) {
        sig[2 * i][2 * j] = std::real(m) + std::real(k) + 0.5 * delta;
        sig[2 * i + 1][2 * j + 1] = -std::real(m) + std::real(k) + 0.5 * delta;
        sig[2 * i][2 * j + 1] = std::imag(m) + std::imag(k);
        sig[2 * i + 1][2 * j] = std::imag(m) - std::imag(k);
    };
    fill_block(0, 0, m11, complex(k11, 0.0), 1.0);
    fill_block(1, 1, m22, complex(k22, 0.0), 1.0);
    fill_block(0, 1, m12, k12, 0.0);
    fill_block(1, 0, m12, std::conj(k12), 0.0);

    // Eigenvalues of i Omega sigma come in +/- nu pairs.
    std::vector<complex> m(16);
    const int omega_sign[4] = {1, -1, 1, -1};     // Omega rows: (p_a, -x_a, p_b, -x_b)
    const int omega_index[4] = {1, 0, 3, 2};
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            m[c * 4 + r] = complex(0.0, double(omega_sign[r])) * sig[omega_index[r]][c];

    std::vector<complex> ev(4);
    const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', 4, m.data(), 4, ev.data(),
                                          nullptr, 1, nullptr, 1);
    if (info != 0) throw std::runtime_error("rc_symplectic_eigenvalues: eigensolve failed");

    std::array<double, 4> mags{};
    for (int k = 0; k < 4; ++k) mags[std::size_t(k)] = std::abs(ev[std::size_t(k)]);
    std::sort(mags.begin(), mags.end(), std::greater<double>());
    return {mags[0], mags[2]};  // one representative per +/- pair
}

MomentDeviation moment_deviation(const StateSeries& reference, const StateSeries& other) {
    const std::size_t m = reference.a.size();
    if (other.a.size() != m)
        throw std::invalid_argument("moment_deviation: series lengths disagree");
    MomentDeviation dev;
    double s_a = 0.0, s_aa = 0.0, s_n = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double da = std::abs(reference.a[k] - other.a[k]);
        const double daa = std::abs(reference.aa[k] - other.aa[k]);
        const double dn = std::abs(reference.n[k] - other.n[k]);
        dev.max_a = std::max(dev.max_a, da);
        dev.max_aa = std::max(dev.max_aa, daa);
        dev.max_n = std::max(dev.max_n, dn);
        s_a += da * da;
        s_aa += daa * daa;
        s_n += dn * dn;
    }
    const double dt = reference.grid.dt;
    dev.l2_a = std::sqrt(s_a * dt);
    dev.l2_aa = std::sqrt(s_aa * dt);
    dev.l2_n = std::sqrt(s_n * dt);
    return dev;
}

}  // namespace fano
