#include "fano/coefficients.hpp"

#include <cmath>
#include <limits>

#include "fano/parallel.hpp"

namespace fano {

namespace {

// Phase recurrence e^{i w t_n} with periodic resync against accumulated
// rounding drift.
constexpr std::size_t kPhaseResync = 4096;

struct NoiseNode {
    double omega;
    double weight;  // J(w) n_B(w) dw, or |g|^2 n_B for discrete modes
};

std::vector<NoiseNode> noise_nodes(const SpectralDensity& J, const FrequencyCutoff& cutoff,
                                   double beta, std::size_t n_omega, bool* infrared_convergent) {
    *infrared_convergent = true;
    std::vector<NoiseNode> nodes;
    if (const auto* disc = std::get_if<DiscreteSumSpectralDensity>(&J)) {
        nodes.reserve(disc->modes.size());
        for (const auto& m : disc->modes)
            nodes.push_back({m.omega, std::norm(m.g) * bose_occupation(m.omega, beta)});
        return nodes;
    }
    if (n_omega == 0) throw std::invalid_argument("noise_integral: n_omega must be positive");
    if (cutoff.use_full_real_axis && std::holds_alternative<FlatSpectralDensity>(J))
        throw std::invalid_argument(
            "noise_integral: a flat density carries uniform weight at negative frequencies, so "
            "the full-axis thermal integral grows with the window instead of converging; use a "
            "positive half-axis cutoff");
    if (cutoff.use_full_real_axis) {
        // Even node count keeps the midpoint grid symmetric about w = 0 with
        // no node at the thermal pole; the +w/-w pair weights then cancel the
        // 1/(beta w) singularity to a bounded remainder.
        if (n_omega % 2 != 0) ++n_omega;
        const double dw = 2.0 * cutoff.omega_max / static_cast<double>(n_omega);
        nodes.reserve(n_omega);
        for (std::size_t q = 0; q < n_omega; ++q) {
            const double w = -cutoff.omega_max + (static_cast<double>(q) + 0.5) * dw;
            nodes.push_back({w, evaluate(J, w) * bose_occupation(w, beta) * dw});
        }
    } else {
        const double dw = cutoff.omega_max / static_cast<double>(n_omega);
        nodes.reserve(n_omega);
        for (std::size_t q = 0; q < n_omega; ++q) {
            const double w = (static_cast<double>(q) + 0.5) * dw;
            nodes.push_back({w, evaluate(J, w) * bose_occupation(w, beta) * dw});
        }
        // With spectral weight at w = 0+ the positive-axis thermal integral
        // diverges logarithmically: refining the grid cannot converge.
        if (!std::isinf(beta) && evaluate(J, nodes.front().omega) > 0.0)
            *infrared_convergent = false;
    }
    return nodes;
}

}  // namespace

void validate_environment(const EnvironmentState& env) {
    if (!(env.beta > 0.0))
        throw std::invalid_argument("EnvironmentState: beta must be positive (may be +inf)");
    for (const auto& m : env.squeezed) {
        if (!(m.omega > 0.0))
            throw std::invalid_argument("EnvironmentState: squeezed mode frequency must be positive");
        check_squeeze_physical(m.cc, bose_occupation(m.omega, env.beta));
    }
}

FrequencyShiftSeries omega_gamma(const GreenFunction& gf) {
    const std::vector<complex> L = log_derivative(gf);
    FrequencyShiftSeries out;
    out.omega_r.resize(L.size());
    out.gamma.resize(L.size());
    for (std::size_t k = 0; k < L.size(); ++k) {
        out.omega_r[k] = -L[k].imag();
        out.gamma[k] = -2.0 * L[k].real();
    }
    return out;
}

NoiseSeries noise_integral(const SpectralDensity& J, const FrequencyCutoff& cutoff, double beta,
                           const GreenFunction& gf, std::size_t n_omega, unsigned workers) {
    if (gf.g.size() != gf.grid.size())
        throw std::invalid_argument("noise_integral: inconsistent propagator series");
    const std::size_t n_pts = gf.grid.size();
    NoiseSeries out;
    out.I.assign(n_pts, 0.0);
    out.Idot.assign(n_pts, 0.0);

    if (std::isinf(beta) && !cutoff.use_full_real_axis &&
        !std::holds_alternative<DiscreteSumSpectralDensity>(J))
        return out;  // zero-temperature physical bath carries no thermal noise

    bool converged = true;
    const std::vector<NoiseNode> nodes = noise_nodes(J, cutoff, beta, n_omega, &converged);
    out.infrared_convergent = converged;
    if (nodes.empty()) return out;

    const double dt = gf.grid.dt;
    const unsigned w = resolve_workers(workers);
    const std::size_t n_chunks = std::min<std::size_t>(w, nodes.size());
    std::vector<std::vector<double>> part_i(n_chunks), part_idot(n_chunks);

    parallel_for(nodes.size(), workers, [&](std::size_t begin, std::size_t end, std::size_t c) {
        auto& ti = part_i[c];
        auto& tidot = part_idot[c];
        ti.assign(n_pts, 0.0);
        tidot.assign(n_pts, 0.0);
        for (std::size_t q = begin; q < end; ++q) {
            const double wq = nodes[q].omega;
            const double weight = nodes[q].weight;
            const complex rot = std::exp(I_UNIT * wq * dt);
            complex d{0.0, 0.0};
            complex phase{1.0, 0.0};
            for (std::size_t n = 1; n < n_pts; ++n) {
                const complex phase_next = (n % kPhaseResync == 0)
                                               ? std::exp(I_UNIT * wq * gf.grid.t(n))
                                               : phase * rot;
                d += 0.5 * dt * (gf.g[n - 1] * phase + gf.g[n] * phase_next);
                phase = phase_next;
                ti[n] += weight * std::norm(d);
                tidot[n] += weight * 2.0 * (std::conj(d) * gf.g[n] * phase).real();
            }
        }
    });

    for (std::size_t c = 0; c < n_chunks; ++c) {
        if (part_i[c].empty()) continue;
        for (std::size_t n = 0; n < n_pts; ++n) {
            out.I[n] += part_i[c][n];
            out.Idot[n] += part_idot[c][n];
        }
    }
    return out;
}

namespace {

// Shared accumulator sweep for the special-mode responses: calls sink(k, n,
// c_n, cdot_n) for every special mode k and grid index n >= 1, where
// c(t) = int_0^t G(t-tau) e^{-i w tau} dtau and cdot = G - i w c.
template <typename Mode, typename Sink>
void mode_response_sweep(const GreenFunction& gf, const std::vector<Mode>& modes, Sink&& sink) {
    const double dt = gf.grid.dt;
    const std::size_t n_pts = gf.grid.size();
    for (std::size_t k = 0; k < modes.size(); ++k) {
        const double wk = modes[k].omega;
        const complex rot = std::exp(I_UNIT * wk * dt);
        complex d{0.0, 0.0};
        complex phase{1.0, 0.0};
        for (std::size_t n = 1; n < n_pts; ++n) {
            const complex phase_next = (n % kPhaseResync == 0)
                                           ? std::exp(I_UNIT * wk * gf.grid.t(n))
                                           : phase * rot;
            d += 0.5 * dt * (gf.g[n - 1] * phase + gf.g[n] * phase_next);
            phase = phase_next;
            const complex c = d * std::conj(phase);
            const complex cdot = gf.g[n] - I_UNIT * wk * c;
            sink(k, n, c, cdot);
        }
    }
}

}  // namespace

ForceSeries displacement_response(const GreenFunction& gf,
                                  const std::vector<DisplacedBathMode>& modes) {
    ForceSeries out;
    out.F.assign(gf.grid.size(), complex{0.0, 0.0});
    out.Fdot.assign(gf.grid.size(), complex{0.0, 0.0});
    for (const auto& m : modes) out.Fdot[0] += -I_UNIT * m.g * m.alpha;  // c = 0, cdot = G(0)
    mode_response_sweep(gf, modes, [&](std::size_t k, std::size_t n, complex c, complex cdot) {
        const complex ga = modes[k].g * modes[k].alpha;
        out.F[n] += -I_UNIT * ga * c;
        out.Fdot[n] += -I_UNIT * ga * cdot;
    });
    return out;
}

SqueezeSeries squeeze_response(const GreenFunction& gf,
                               const std::vector<SqueezedBathMode>& modes) {
    SqueezeSeries out;
    out.Jsq.assign(gf.grid.size(), complex{0.0, 0.0});
    out.Jsq_dot.assign(gf.grid.size(), complex{0.0, 0.0});
    mode_response_sweep(gf, modes, [&](std::size_t k, std::size_t n, complex c, complex cdot) {
        const complex gcc = modes[k].g * modes[k].g * modes[k].cc;
        out.Jsq[n] += gcc * c * c;
        out.Jsq_dot[n] += gcc * 2.0 * c * cdot;
    });
    return out;
}

CoefficientSeries build_coefficients(const SpectralDensity& J, const FrequencyCutoff& cutoff,
                                     const EnvironmentState& env, const GreenFunction& gf,
                                     std::size_t n_omega, unsigned workers) {
    validate_environment(env);
    const std::vector<complex> L = log_derivative(gf);
    const std::size_t n_pts = gf.grid.size();

    CoefficientSeries out;
    out.grid = gf.grid;
    out.omega_r.resize(n_pts);
    out.gamma.resize(n_pts);
    for (std::size_t k = 0; k < n_pts; ++k) {
        out.omega_r[k] = -L[k].imag();
        out.gamma[k] = -2.0 * L[k].real();
    }

    const NoiseSeries noise = noise_integral(J, cutoff, env.beta, gf, n_omega, workers);
    out.infrared_convergent = noise.infrared_convergent;
    out.bath_I = noise.I;
    out.gamma_N.resize(n_pts);
    out.N.resize(n_pts);
    out.N_defined.resize(n_pts);
    for (std::size_t k = 0; k < n_pts; ++k) {
        out.gamma_N[k] = out.gamma[k] * noise.I[k] + noise.Idot[k];
        const bool defined = std::abs(out.gamma[k]) >= 1e-9;
        out.N_defined[k] = defined ? 1 : 0;
        out.N[k] = defined ? out.gamma_N[k] / out.gamma[k]
                           : std::numeric_limits<double>::quiet_NaN();
    }

    const ForceSeries force = displacement_response(gf, env.displaced);
    out.F = force.F;
    out.f.resize(n_pts);
    for (std::size_t k = 0; k < n_pts; ++k) out.f[k] = force.Fdot[k] - L[k] * force.F[k];

    const SqueezeSeries sq = squeeze_response(gf, env.squeezed);
    out.Jsq = sq.Jsq;
    out.delta.resize(n_pts);
    for (std::size_t k = 0; k < n_pts; ++k)
        out.delta[k] = sq.Jsq_dot[k] - 2.0 * L[k] * sq.Jsq[k];

    return out;
}

MarkovRates markov_limit(const SpectralDensity& J, double lambda, double omega0,
                         const FrequencyCutoff& cutoff) {
    if (!(lambda > 0.0)) throw std::invalid_argument("markov_limit: lambda must be positive");
    const double l2 = lambda * lambda;
    double jw;
    if (const auto* flat = std::get_if<FlatSpectralDensity>(&J))
        jw = flat->gamma0 / (2.0 * M_PI);
    else
        jw = evaluate(J, omega0);
    if (!cutoff.use_full_real_axis && omega0 < 0.0) jw = 0.0;
    return MarkovRates{omega0 + l2 * lamb_shift(J, omega0, cutoff), 2.0 * M_PI * l2 * jw};
}

MarkovRates second_order_lorentzian_rates(const LorentzianSpectralDensity& J, double lambda,
                                          double omega0, double t) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("second_order_lorentzian_rates: lambda must be positive");
    if (!(J.gamma0 > 0.0) || !(J.eta > 0.0))
        throw std::invalid_argument("second_order_lorentzian_rates: gamma0 and eta must be positive");
    // d/dt log G = -i omega0 - lambda^2 (gamma0 eta / 2) (e^{(i D - eta) t} - 1)/(i D - eta)
    const complex s{-J.eta, omega0 - J.omega_c};
    const complex a = 0.5 * J.gamma0 * J.eta * (std::exp(s * t) - 1.0) / s;
    const complex L = -I_UNIT * omega0 - lambda * lambda * a;
    return MarkovRates{-L.imag(), -2.0 * L.real()};
}

ClassicalForceSeries classical_force(const std::vector<DisplacedBathMode>& modes, double omega0,
                                     const TimeGrid& grid) {
    ClassicalForceSeries out;
    out.F.assign(grid.size(), complex{0.0, 0.0});
    out.f.assign(grid.size(), complex{0.0, 0.0});
    const double res_tol = 1e-12 * std::max(1.0, std::abs(omega0));
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const double t = grid.t(n);
        const complex e0 = std::exp(-I_UNIT * omega0 * t);
        for (const auto& m : modes) {
            const complex ga = m.g * m.alpha;
            const complex ek = std::exp(-I_UNIT * m.omega * t);
            // free-propagator response; a resonant mode degenerates to i t e0
            const complex c0 = (std::abs(omega0 - m.omega) < res_tol)
                                   ? I_UNIT * t * e0
                                   : (ek - e0) / (I_UNIT * (omega0 - m.omega));
            out.F[n] += -I_UNIT * ga * c0;
            out.f[n] += -I_UNIT * ga * ek;
        }
    }
    return out;
}

}  // namespace fano
