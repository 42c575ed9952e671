#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "fano/spectral.hpp"
#include "fano/types.hpp"

namespace fano {

// Brute-force reference: the full model with a finite bath is quadratic, so
// everything follows from the (N+1)-dimensional one-particle Hamiltonian
//   h[0][0] = omega0, h[0][j] = g_j, h[j][j] = omega_j.
// This module diagonalizes h exactly and reconstructs reduced-mode moments
// without any open-system approximation, giving an independent check of the
// reduced dynamics.
struct OracleModel {
    double omega0{0.0};
    DiscreteSumSpectralDensity bath;
};

struct OneParticleSpectrum {
    std::size_t dim{0};               // N + 1, mode 0 is the system
    std::vector<double> eigenvalues;  // ascending
    bool real_couplings{true};
    std::vector<double> vectors_real;   // column-major, used when real_couplings
    std::vector<complex> vectors_cplx;  // column-major otherwise

    complex vec(std::size_t row, std::size_t col) const {
        return real_couplings ? complex{vectors_real[col * dim + row], 0.0}
                              : vectors_cplx[col * dim + row];
    }
};

// Dense eigensolve of the one-particle Hamiltonian.  Real couplings take the
// symmetric fast path.  Refuses baths above 5000 modes (dense O(N^3) solve).
OneParticleSpectrum one_particle_spectrum(const OracleModel& model);

// Full one-particle propagator U(t) = V e^{-i eps t} V^dag, column-major
// dim x dim.  U is unitary because h is Hermitian.
std::vector<complex> one_particle_propagator(const OneParticleSpectrum& spectrum, double t);

// Exact propagator matrix element <0| e^{-i h t} |0> at the given times.
std::vector<complex> oracle_green(const OneParticleSpectrum& spectrum,
                                  const std::vector<double>& times);

// Initial Gaussian data for the full model: an arbitrary Gaussian system state
// and a product bath at inverse temperature beta, where selected bath modes
// (addressed by their index in model.bath) additionally carry a coherent
// displacement or an anomalous second moment <<bb>>.
struct OracleInitialState {
    complex a{0.0, 0.0};
    complex aa{0.0, 0.0};
    double n{0.0};
    double beta{0.0};
    std::vector<std::pair<std::size_t, complex>> displaced;
    std::vector<std::pair<std::size_t, complex>> squeezed;
};

struct OracleMomentSeries {
    std::vector<double> times;
    std::vector<complex> a;
    std::vector<complex> aa;
    std::vector<double> n;
};

// Exact reduced-mode moments at the given (strobe) times, via the evolved
// one-particle frame.  The model is number-conserving, so normal and
// anomalous second moments propagate independently.  `workers` = 0 picks a
// thread count automatically.
OracleMomentSeries oracle_moments(const OneParticleSpectrum& spectrum, const OracleModel& model,
                                  const OracleInitialState& init,
                                  const std::vector<double>& times, unsigned workers = 0);

// Reduced-mode occupation in the global Gibbs state of the coupled model,
// sum_k |V_{0k}|^2 n_B(eps_k).  Defined only when every one-particle
// eigenvalue is positive; otherwise throws.
double oracle_global_gibbs_occupation(const OneParticleSpectrum& spectrum, double beta);

}  // namespace fano
