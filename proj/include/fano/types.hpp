// Shared scalar/grid types for the reduced-dynamics engine.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fano {

using complex = std::complex<double>;

inline constexpr complex I_UNIT{0.0, 1.0};

// Uniform time grid t_k = k*dt, k = 0..steps (steps+1 samples, t0 = 0).
struct TimeGrid {
    double dt{0.0};
    std::size_t steps{0};

    TimeGrid() = default;
    TimeGrid(double dt_, std::size_t steps_) : dt(dt_), steps(steps_) {
        if (!(dt > 0.0)) throw std::invalid_argument("TimeGrid: dt must be positive");
        if (steps == 0) throw std::invalid_argument("TimeGrid: need at least one step");
    }

    std::size_t size() const noexcept { return steps + 1; }
    double t(std::size_t k) const noexcept { return static_cast<double>(k) * dt; }
    double t_end() const noexcept { return static_cast<double>(steps) * dt; }

    std::vector<double> times() const {
        std::vector<double> out(size());
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = t(k);
        return out;
    }
};

// Bose-Einstein occupation at inverse temperature beta; beta may be +inf
// (zero temperature, occupation identically zero). Negative omega is allowed
// formally (full-real-axis spectral conventions) and yields a negative value.
inline double bose_occupation(double omega, double beta) {
    const double x = beta * omega;
    if (x == 0.0 || std::isnan(x)) throw std::domain_error("bose_occupation: pole at omega = 0");
    if (std::isinf(beta)) return omega > 0.0 ? 0.0 : -1.0;
    // expm1 keeps precision for small |x|
    return 1.0 / std::expm1(x);
}

// A single-mode Gaussian state with occupation n and anomalous moment <bb> is
// positive iff |<bb>| <= sqrt(n(n+1)).
inline void check_squeeze_physical(const std::complex<double>& cc, double occupation) {
    const double bound = std::sqrt(occupation * (occupation + 1.0));
    if (std::abs(cc) > bound * (1.0 + 1e-12))
        throw std::invalid_argument(
            "squeezed bath mode is unphysical: |<bb>| must not exceed sqrt(n(n+1)) "
            "for its thermal occupation n");
}

}  // namespace fano
