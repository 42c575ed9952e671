#include "fano/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "fano/parallel.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace fano {

namespace {

constexpr std::size_t kMaxBathModes = 5000;

}  // namespace

OneParticleSpectrum one_particle_spectrum(const OracleModel& model) {
    const std::size_t nb = model.bath.modes.size();
    if (nb == 0) throw std::invalid_argument("one_particle_spectrum: empty bath");
    if (nb > kMaxBathModes)
        throw std::invalid_argument(
            "one_particle_spectrum: bath above 5000 modes; the dense eigensolve "
            "is not sized for that");
    const std::size_t dim = nb + 1;

    bool real_couplings = true;
    for (const auto& m : model.bath.modes)
        if (m.g.imag() != 0.0) real_couplings = false;

    OneParticleSpectrum s;
    s.dim = dim;
    s.eigenvalues.resize(dim);
    s.real_couplings = real_couplings;

    const auto n = static_cast<lapack_int>(dim);
    if (real_couplings) {
        s.vectors_real.assign(dim * dim, 0.0);
        auto& a = s.vectors_real;  // column-major, upper triangle filled
        a[0] = model.omega0;
        for (std::size_t j = 0; j < nb; ++j) {
            const std::size_t col = j + 1;
            a[col * dim + 0] = model.bath.modes[j].g.real();
            a[col * dim + col] = model.bath.modes[j].omega;
        }
        const lapack_int info =
            LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, a.data(), n, s.eigenvalues.data());
        if (info != 0)
            throw std::runtime_error("one_particle_spectrum: dsyevd failed, info = " +
                                     std::to_string(info));
    } else {
        s.vectors_cplx.assign(dim * dim, complex{0.0, 0.0});
        auto& a = s.vectors_cplx;
        a[0] = model.omega0;
        for (std::size_t j = 0; j < nb; ++j) {
            const std::size_t col = j + 1;
            a[col * dim + 0] = model.bath.modes[j].g;  // h_{0j} in the upper triangle
            a[col * dim + col] = model.bath.modes[j].omega;
        }
        const lapack_int info =
            LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n, a.data(), n, s.eigenvalues.data());
        if (info != 0)
            throw std::runtime_error("one_particle_spectrum: zheevd failed, info = " +
                                     std::to_string(info));
    }
    return s;
}

std::vector<complex> one_particle_propagator(const OneParticleSpectrum& spectrum, double t) {
    if (!(t >= 0.0))
        throw std::invalid_argument("one_particle_propagator: time must be nonnegative");
    const std::size_t dim = spectrum.dim;
    std::vector<complex> phase(dim);
    for (std::size_t k = 0; k < dim; ++k)
        phase[k] = std::exp(-I_UNIT * spectrum.eigenvalues[k] * t);

    // U = V diag(phase) V^dag, assembled column by column.
    std::vector<complex> u(dim * dim, complex{0.0, 0.0});
    for (std::size_t c = 0; c < dim; ++c) {
        for (std::size_t k = 0; k < dim; ++k) {
            const complex w = phase[k] * std::conj(spectrum.vec(c, k));
            if (w == complex{0.0, 0.0}) continue;
            for (std::size_t r = 0; r < dim; ++r) u[c * dim + r] += spectrum.vec(r, k) * w;
        }
    }
    return u;
}

std::vector<complex> oracle_green(const OneParticleSpectrum& spectrum,
                                  const std::vector<double>& times) {
    const std::size_t dim = spectrum.dim;
    std::vector<double> weight(dim);
    for (std::size_t k = 0; k < dim; ++k) weight[k] = std::norm(spectrum.vec(0, k));
    std::vector<complex> g(times.size());
    for (std::size_t it = 0; it < times.size(); ++it) {
        complex sum{0.0, 0.0};
        for (std::size_t k = 0; k < dim; ++k)
            sum += weight[k] * std::exp(-I_UNIT * spectrum.eigenvalues[k] * times[it]);
        g[it] = sum;
    }
    return g;
}

OracleMomentSeries oracle_moments(const OneParticleSpectrum& spectrum, const OracleModel& model,
                                  const OracleInitialState& init,
                                  const std::vector<double>& times, unsigned workers) {
    const std::size_t dim = spectrum.dim;
    const std::size_t nb = model.bath.modes.size();
    if (dim != nb + 1)
        throw std::invalid_argument("oracle_moments: spectrum does not match the model");
    if (!(init.beta > 0.0))
        throw std::invalid_argument("oracle_moments: beta must be positive (may be +inf)");

    // Initial one-particle data in the mode frame.
    std::vector<complex> first(dim, complex{0.0, 0.0});
    std::vector<double> occ_c(dim, 0.0);    // central <c_j^dag c_j>
    std::vector<complex> anom_c(dim, complex{0.0, 0.0});  // central <c_j c_j>
    first[0] = init.a;
    occ_c[0] = init.n - std::norm(init.a);
    anom_c[0] = init.aa - init.a * init.a;
    for (std::size_t j = 0; j < nb; ++j) {
        if (!(model.bath.modes[j].omega > 0.0))
            throw std::invalid_argument(
                "oracle_moments: thermal preparation needs strictly positive mode frequencies");
        occ_c[j + 1] = bose_occupation(model.bath.modes[j].omega, init.beta);
    }
    for (const auto& [idx, alpha] : init.displaced) {
        if (idx >= nb) throw std::invalid_argument("oracle_moments: displaced index out of range");
        first[idx + 1] = alpha;
    }
    for (const auto& [idx, cc] : init.squeezed) {
        if (idx >= nb) throw std::invalid_argument("oracle_moments: squeezed index out of range");
        check_squeeze_physical(cc, occ_c[idx + 1]);
        anom_c[idx + 1] = cc;
    }

    // w = V^dag first : the first-moment vector in the eigenframe.
    std::vector<complex> wvec(dim, complex{0.0, 0.0});
    for (std::size_t k = 0; k < dim; ++k) {
        complex acc{0.0, 0.0};
        for (std::size_t row = 0; row < dim; ++row)
            acc += std::conj(spectrum.vec(row, k)) * first[row];
        wvec[k] = acc;
    }

    OracleMomentSeries out;
    out.times = times;
    out.a.resize(times.size());
    out.aa.resize(times.size());
    out.n.resize(times.size());

    // Sparse list of modes with nonzero anomalous data keeps the <aa> sum
    // cheap; the occupation sum runs over everything.
    std::vector<std::size_t> anom_idx;
    for (std::size_t j = 0; j < dim; ++j)
        if (anom_c[j] != complex{0.0, 0.0}) anom_idx.push_back(j);

    parallel_for(times.size(), workers, [&](std::size_t begin, std::size_t end, std::size_t) {
        std::vector<complex> z(dim), u(dim);
        for (std::size_t it = begin; it < end; ++it) {
            const double t = times[it];
            for (std::size_t k = 0; k < dim; ++k)
                z[k] = std::exp(-I_UNIT * spectrum.eigenvalues[k] * t);

            // <a>(t) = sum_k V_{0k} e^{-i eps_k t} w_k
            complex amean{0.0, 0.0};
            for (std::size_t k = 0; k < dim; ++k) amean += spectrum.vec(0, k) * z[k] * wvec[k];

            // Row 0 of U(t) = V e^{-i eps t} V^dag : u_j = sum_k conj(V_{jk}) V_{0k} z_k.
            if (spectrum.real_couplings) {
                const auto& vr = spectrum.vectors_real;
                for (std::size_t j = 0; j < dim; ++j) u[j] = complex{0.0, 0.0};
                for (std::size_t k = 0; k < dim; ++k) {
                    const complex zk = vr[k * dim + 0] * z[k];
                    if (zk == complex{0.0, 0.0}) continue;
                    const double* col = &vr[k * dim];
                    for (std::size_t j = 0; j < dim; ++j) u[j] += col[j] * zk;
                }
            } else {
                for (std::size_t j = 0; j < dim; ++j) u[j] = complex{0.0, 0.0};
                for (std::size_t k = 0; k < dim; ++k) {
                    const complex zk = spectrum.vec(0, k) * z[k];
                    for (std::size_t j = 0; j < dim; ++j)
                        u[j] += std::conj(spectrum.vec(j, k)) * zk;
                }
            }

            double n_c = 0.0;
            for (std::size_t j = 0; j < dim; ++j) n_c += std::norm(u[j]) * occ_c[j];
            complex aa_c{0.0, 0.0};
            for (const std::size_t j : anom_idx) aa_c += u[j] * u[j] * anom_c[j];

            out.a[it] = amean;
            out.n[it] = n_c + std::norm(amean);
            out.aa[it] = aa_c + amean * amean;
        }
    });
    return out;
}

double oracle_global_gibbs_occupation(const OneParticleSpectrum& spectrum, double beta) {
    if (!(beta > 0.0))
        throw std::invalid_argument("oracle_global_gibbs_occupation: beta must be positive");
    double n = 0.0;
    for (std::size_t k = 0; k < spectrum.dim; ++k) {
        const double eps = spectrum.eigenvalues[k];
        if (eps <= 0.0)
            throw std::runtime_error(
                "oracle_global_gibbs_occupation: one-particle spectrum reaches down to " +
                std::to_string(eps) +
                "; the global Gibbs state needs all eigenvalues positive");
        if (!std::isinf(beta)) n += std::norm(spectrum.vec(0, k)) * bose_occupation(eps, beta);
    }
    return n;
}

}  // namespace fano
