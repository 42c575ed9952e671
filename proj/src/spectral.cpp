#include "fano/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fano {

namespace {

void validate_lorentzian(const LorentzianSpectralDensity& lor) {
    if (!(lor.gamma0 > 0.0)) throw std::invalid_argument("Lorentzian: gamma0 must be positive");
    if (!(lor.eta > 0.0)) throw std::invalid_argument("Lorentzian: eta must be positive");
}

double lorentzian_value(const LorentzianSpectralDensity& lor, double omega) {
    const double d = lor.omega_c - omega;
    return lor.gamma0 / (2.0 * M_PI) * lor.eta * lor.eta / (d * d + lor.eta * lor.eta);
}

// Natural cubic spline second derivatives (tridiagonal solve).
std::vector<double> spline_second_derivatives(const std::vector<double>& x,
                                              const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> m(n, 0.0), u(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double sig = (x[i] - x[i - 1]) / (x[i + 1] - x[i - 1]);
        const double p = sig * m[i - 1] + 2.0;
        m[i] = (sig - 1.0) / p;
        u[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]) - (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
        u[i] = (6.0 * u[i] / (x[i + 1] - x[i - 1]) - sig * u[i - 1]) / p;
    }
    for (std::size_t k = n - 1; k-- > 1;) m[k] = m[k] * m[k + 1] + u[k];
    m[0] = m[n - 1] = 0.0;
    return m;
}

double tabulated_value(const TabulatedSpectralDensity& tab, double omega) {
    const auto& x = tab.omega;
    const auto& y = tab.j;
    if (omega < x.front() || omega > x.back()) return 0.0;
    const auto it = std::upper_bound(x.begin(), x.end(), omega);
    std::size_t hi = static_cast<std::size_t>(it - x.begin());
    if (hi == 0) hi = 1;
    if (hi >= x.size()) hi = x.size() - 1;
    const std::size_t lo = hi - 1;
    const double h = x[hi] - x[lo];
    const double a = (x[hi] - omega) / h;
    const double b = (omega - x[lo]) / h;
    if (tab.interpolation_order == 1) return a * y[lo] + b * y[hi];
    // cubic spline (second derivatives recomputed on demand; tables are small)
    static thread_local const TabulatedSpectralDensity* cached_tab = nullptr;
    static thread_local std::vector<double> cached_m;
    if (cached_tab != &tab || cached_m.size() != x.size()) {
        cached_m = spline_second_derivatives(x, y);
        cached_tab = &tab;
    }
    const auto& m = cached_m;
    return a * y[lo] + b * y[hi] +
           ((a * a * a - a) * m[lo] + (b * b * b - b) * m[hi]) * h * h / 6.0;
}

void validate_tabulated(const TabulatedSpectralDensity& tab) {
    if (tab.omega.size() != tab.j.size() || tab.omega.size() < 2)
        throw std::invalid_argument("Tabulated: need >= 2 (omega, J) samples of equal length");
    for (std::size_t i = 1; i < tab.omega.size(); ++i)
        if (!(tab.omega[i] > tab.omega[i - 1]))
            throw std::invalid_argument("Tabulated: omega grid must be strictly increasing");
    if (tab.interpolation_order != 1 && tab.interpolation_order != 3)
        throw std::invalid_argument("Tabulated: interpolation_order must be 1 or 3");
}

std::pair<double, double> window(const FrequencyCutoff& cutoff) {
    if (!(cutoff.omega_max > 0.0))
        throw std::invalid_argument("FrequencyCutoff: omega_max must be positive");
    return cutoff.use_full_real_axis ? std::make_pair(-cutoff.omega_max, cutoff.omega_max)
                                     : std::make_pair(0.0, cutoff.omega_max);
}

}  // namespace

double evaluate(const SpectralDensity& J, double omega) {
    return std::visit(
        [omega](const auto& j) -> double {
            using T = std::decay_t<decltype(j)>;
            if constexpr (std::is_same_v<T, FlatSpectralDensity>) {
                return j.gamma0 / (2.0 * M_PI);
            } else if constexpr (std::is_same_v<T, LorentzianSpectralDensity>) {
                validate_lorentzian(j);
                return lorentzian_value(j, omega);
            } else if constexpr (std::is_same_v<T, TabulatedSpectralDensity>) {
                validate_tabulated(j);
                return tabulated_value(j, omega);
            } else {
                throw std::invalid_argument(
                    "evaluate: a discrete mode sum has no pointwise density");
            }
        },
        J);
}

double integrated_weight(const SpectralDensity& J, const FrequencyCutoff& cutoff) {
    if (const auto* disc = std::get_if<DiscreteSumSpectralDensity>(&J)) {
        double sum = 0.0;
        for (const auto& m : disc->modes) sum += std::norm(m.g);
        return sum;
    }
    const auto [lo, hi] = window(cutoff);
    auto f = [&](double w) -> complex { return evaluate(J, w); };
    return integrate(f, lo, hi).value.real();
}

complex memory_kernel(const SpectralDensity& J, double t, const FrequencyCutoff& cutoff) {
    if (std::holds_alternative<FlatSpectralDensity>(J))
        throw std::invalid_argument(
            "memory_kernel: flat spectral density has a Dirac-delta kernel; "
            "use the dedicated flat-path routines");
    if (const auto* disc = std::get_if<DiscreteSumSpectralDensity>(&J)) {
        complex sum{0.0, 0.0};
        for (const auto& m : disc->modes) sum += std::norm(m.g) * std::exp(-I_UNIT * m.omega * t);
        return sum;
    }
    if (const auto* lor = std::get_if<LorentzianSpectralDensity>(&J);
        lor && cutoff.use_full_real_axis) {
        validate_lorentzian(*lor);
        // K(t) = (gamma0 eta / 2) e^{-eta |t|} e^{-i w_c t}
        return 0.5 * lor->gamma0 * lor->eta * std::exp(-lor->eta * std::abs(t)) *
               std::exp(-I_UNIT * lor->omega_c * t);
    }
    const auto [lo, hi] = window(cutoff);
    auto f = [&](double w) -> complex { return evaluate(J, w) * std::exp(-I_UNIT * w * t); };
    return integrate_oscillatory(f, lo, hi, t).value;
}

double lamb_shift(const SpectralDensity& J, double omega, const FrequencyCutoff& cutoff) {
    if (std::holds_alternative<DiscreteSumSpectralDensity>(J))
        throw std::invalid_argument("lamb_shift: defined for continuum spectral densities only");
    if (std::holds_alternative<FlatSpectralDensity>(J)) {
        // Constant density over the symmetric whole axis: the principal value
        // cancels identically.
        return 0.0;
    }
    if (const auto* lor = std::get_if<LorentzianSpectralDensity>(&J);
        lor && cutoff.use_full_real_axis) {
        validate_lorentzian(*lor);
        const double d = omega - lor->omega_c;
        return 0.5 * lor->gamma0 * lor->eta * d / (d * d + lor->eta * lor->eta);
    }
    const auto [lo, hi] = window(cutoff);
    if (const auto* tab = std::get_if<TabulatedSpectralDensity>(&J)) {
        validate_tabulated(*tab);
        if (omega == tab->omega.front() || omega == tab->omega.back())
            throw std::invalid_argument(
                "lamb_shift: frequency coincides with a tabulation edge (endpoint singularity)");
    }
    auto f = [&](double w) -> complex { return evaluate(J, w); };
    if (omega <= lo || omega >= hi) {
        // No pole inside the window; plain integral of J/(omega - w).
        auto g = [&](double w) -> complex { return evaluate(J, w) / (omega - w); };
        return integrate(g, lo, hi).value.real();
    }
    // Delta(w) = P int J(w') / (w - w') dw' = -P int J(w') / (w' - w) dw'
    return -principal_value(f, lo, hi, omega).value.real();
}

complex kernel_laplace(const SpectralDensity& J, double omega, const FrequencyCutoff& cutoff) {
    if (std::holds_alternative<DiscreteSumSpectralDensity>(J))
        throw std::invalid_argument("kernel_laplace: defined for continuum spectral densities only");
    if (const auto* flat = std::get_if<FlatSpectralDensity>(&J)) {
        return complex{0.5 * flat->gamma0, 0.0};
    }
    double jw = evaluate(J, omega);
    if (!cutoff.use_full_real_axis && omega < 0.0) jw = 0.0;
    return complex{M_PI * jw, lamb_shift(J, omega, cutoff)};
}

DiscreteSumSpectralDensity discretize(const SpectralDensity& J, std::size_t n_modes,
                                      const FrequencyCutoff& cutoff) {
    if (std::holds_alternative<DiscreteSumSpectralDensity>(J))
        throw std::invalid_argument("discretize: input is already discrete");
    if (n_modes == 0) throw std::invalid_argument("discretize: need at least one mode");
    const auto [lo, hi] = window(cutoff);
    const double dw = (hi - lo) / static_cast<double>(n_modes);
    DiscreteSumSpectralDensity out;
    out.modes.reserve(n_modes);
    for (std::size_t k = 0; k < n_modes; ++k) {
        const double w = lo + (static_cast<double>(k) + 0.5) * dw;
        const double jw = evaluate(J, w);
        out.modes.push_back(DiscreteMode{w, complex{std::sqrt(std::max(jw, 0.0) * dw), 0.0}});
    }
    return out;
}

double recurrence_time(const DiscreteSumSpectralDensity& modes) {
    if (modes.modes.size() < 2)
        throw std::invalid_argument("recurrence_time: need at least two modes");
    std::vector<double> ws;
    ws.reserve(modes.modes.size());
    for (const auto& m : modes.modes) ws.push_back(m.omega);
    std::sort(ws.begin(), ws.end());
    double dmin = ws[1] - ws[0];
    for (std::size_t i = 2; i < ws.size(); ++i) dmin = std::min(dmin, ws[i] - ws[i - 1]);
    if (!(dmin > 0.0)) throw std::invalid_argument("recurrence_time: repeated mode frequencies");
    return 2.0 * M_PI / dmin;
}

TabulatedSpectralDensity load_tabulated_csv(const std::string& path, int interpolation_order) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_tabulated_csv: cannot open '" + path + "'");
    TabulatedSpectralDensity tab;
    tab.interpolation_order = interpolation_order;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double w, j;
        if (!(ss >> w >> j))
            throw std::runtime_error("load_tabulated_csv: malformed row at line " +
                                     std::to_string(lineno) + " of '" + path + "'");
        tab.omega.push_back(w);
        tab.j.push_back(j);
    }
    validate_tabulated(tab);
    return tab;
}

const char* variant_name(const SpectralDensity& J) {
    switch (J.index()) {
        case 0: return "flat";
        case 1: return "lorentzian";
        case 2: return "discrete_sum";
        default: return "tabulated";
    }
}

}  // namespace fano
