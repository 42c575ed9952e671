#include "fano/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fano/oracle.hpp"
#include "fano/rcmap.hpp"

namespace fano {

namespace {

using ordered_json = nlohmann::ordered_json;

const std::set<std::string>& known_tolerances() {
    static const std::set<std::string> names = {
        "first_law",        "gibbs_residual",   "equilibrium_agreement",
        "normalization",    "ness_balance",     "ness_convergence",
        "entropy_constancy", "oracle_moments",  "oracle_green",
        "rc_deviation",     "flat_work",        "sigma_floor",
    };
    return names;
}

// ---- config parsing --------------------------------------------------------

[[noreturn]] void config_fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

void require_object(const ordered_json& v, const std::string& path) {
    if (!v.is_object()) config_fail(path, "expected an object");
}

void reject_unknown_keys(const ordered_json& obj, const std::string& path,
                         std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) {
                known = true;
                break;
            }
        if (!known) config_fail(path, "unknown key '" + item.key() + "'");
    }
}

const ordered_json* find_key(const ordered_json& obj, const std::string& key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double get_number(const ordered_json& obj, const std::string& path, const std::string& key) {
    const ordered_json* v = find_key(obj, key);
    if (!v) config_fail(path, "missing required key '" + key + "'");
    if (!v->is_number()) config_fail(path + "." + key, "expected a number");
    return v->get<double>();
}

double get_number_or(const ordered_json& obj, const std::string& path, const std::string& key,
                     double fallback) {
    const ordered_json* v = find_key(obj, key);
    if (!v) return fallback;
    if (!v->is_number()) config_fail(path + "." + key, "expected a number");
    return v->get<double>();
}

std::size_t get_count(const ordered_json& obj, const std::string& path, const std::string& key) {
    const ordered_json* v = find_key(obj, key);
    if (!v) config_fail(path, "missing required key '" + key + "'");
    if (!v->is_number_unsigned()) config_fail(path + "." + key, "expected a nonnegative integer");
    return v->get<std::size_t>();
}

std::size_t get_count_or(const ordered_json& obj, const std::string& path, const std::string& key,
                         std::size_t fallback) {
    if (!find_key(obj, key)) return fallback;
    return get_count(obj, path, key);
}

std::string get_string(const ordered_json& obj, const std::string& path, const std::string& key) {
    const ordered_json* v = find_key(obj, key);
    if (!v) config_fail(path, "missing required key '" + key + "'");
    if (!v->is_string()) config_fail(path + "." + key, "expected a string");
    return v->get<std::string>();
}

std::string get_string_or(const ordered_json& obj, const std::string& path,
                          const std::string& key, const std::string& fallback) {
    if (!find_key(obj, key)) return fallback;
    return get_string(obj, path, key);
}

bool get_bool_or(const ordered_json& obj, const std::string& path, const std::string& key,
                 bool fallback) {
    const ordered_json* v = find_key(obj, key);
    if (!v) return fallback;
    if (!v->is_boolean()) config_fail(path + "." + key, "expected a boolean");
    return v->get<bool>();
}

// Complex values are written as [re, im] pairs.
complex get_complex(const ordered_json& obj, const std::string& path, const std::string& key) {
    const ordered_json* v = find_key(obj, key);
    if (!v) config_fail(path, "missing required key '" + key + "'");
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
        config_fail(path + "." + key, "expected a [re, im] pair");
    return complex((*v)[0].get<double>(), (*v)[1].get<double>());
}

complex get_complex_or(const ordered_json& obj, const std::string& path, const std::string& key,
                       complex fallback) {
    if (!find_key(obj, key)) return fallback;
    return get_complex(obj, path, key);
}

double parse_beta(const ordered_json& obj, const std::string& path) {
    const ordered_json* v = find_key(obj, "beta");
    if (!v) config_fail(path, "missing required key 'beta'");
    if (v->is_string()) {
        if (v->get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
        config_fail(path + ".beta", "expected a positive number or \"inf\"");
    }
    if (!v->is_number()) config_fail(path + ".beta", "expected a positive number or \"inf\"");
    const double beta = v->get<double>();
    if (!(beta > 0.0)) config_fail(path + ".beta", "beta must be positive");
    return beta;
}

SpectralDensity parse_spectral(const ordered_json& obj, const std::string& path) {
    require_object(obj, path);
    const std::string type = get_string(obj, path, "type");
    if (type == "flat") {
        reject_unknown_keys(obj, path, {"type", "gamma0"});
        FlatSpectralDensity flat;
        flat.gamma0 = get_number(obj, path, "gamma0");
        return flat;
    }
    if (type == "lorentzian") {
        reject_unknown_keys(obj, path, {"type", "gamma0", "eta", "omega_c"});
        LorentzianSpectralDensity lor;
        lor.gamma0 = get_number(obj, path, "gamma0");
        lor.eta = get_number(obj, path, "eta");
        lor.omega_c = get_number(obj, path, "omega_c");
        return lor;
    }
    if (type == "discrete_sum") {
        reject_unknown_keys(obj, path, {"type", "modes"});
        const ordered_json* modes = find_key(obj, "modes");
        if (!modes || !modes->is_array() || modes->empty())
            config_fail(path + ".modes", "expected a nonempty array of modes");
        DiscreteSumSpectralDensity sum;
        for (std::size_t j = 0; j < modes->size(); ++j) {
            const std::string mpath = path + ".modes[" + std::to_string(j) + "]";
            const ordered_json& mj = (*modes)[j];
            require_object(mj, mpath);
            reject_unknown_keys(mj, mpath, {"omega", "g"});
            DiscreteMode mode;
            mode.omega = get_number(mj, mpath, "omega");
            mode.g = get_complex(mj, mpath, "g");
            sum.modes.push_back(mode);
        }
        return sum;
    }
    if (type == "tabulated") {
        reject_unknown_keys(obj, path, {"type", "csv", "interpolation_order"});
        const std::string csv = get_string(obj, path, "csv");
        const auto order = static_cast<int>(get_count_or(obj, path, "interpolation_order", 1));
        return load_tabulated_csv(csv, order);
    }
    config_fail(path + ".type",
                "unknown spectral density '" + type +
                    "' (expected flat | lorentzian | discrete_sum | tabulated)");
}

TimeGrid parse_grid(const ordered_json& obj, const std::string& path) {
    require_object(obj, path);
    reject_unknown_keys(obj, path, {"dt", "steps"});
    const double dt = get_number(obj, path, "dt");
    const std::size_t steps = get_count(obj, path, "steps");
    if (!(dt > 0.0)) config_fail(path + ".dt", "dt must be positive");
    if (steps == 0) config_fail(path + ".steps", "need at least one step");
    return TimeGrid(dt, steps);
}

EnvironmentState parse_environment(const ordered_json& obj, const std::string& path) {
    require_object(obj, path);
    reject_unknown_keys(obj, path, {"beta", "displaced", "squeezed"});
    EnvironmentState env;
    env.beta = parse_beta(obj, path);
    if (const ordered_json* arr = find_key(obj, "displaced")) {
        if (!arr->is_array()) config_fail(path + ".displaced", "expected an array");
        for (std::size_t j = 0; j < arr->size(); ++j) {
            const std::string mpath = path + ".displaced[" + std::to_string(j) + "]";
            const ordered_json& mj = (*arr)[j];
            require_object(mj, mpath);
            reject_unknown_keys(mj, mpath, {"omega", "g", "alpha"});
            DisplacedBathMode mode;
            mode.omega = get_number(mj, mpath, "omega");
            mode.g = get_complex(mj, mpath, "g");
            mode.alpha = get_complex(mj, mpath, "alpha");
            env.displaced.push_back(mode);
        }
    }
    if (const ordered_json* arr = find_key(obj, "squeezed")) {
        if (!arr->is_array()) config_fail(path + ".squeezed", "expected an array");
        for (std::size_t j = 0; j < arr->size(); ++j) {
            const std::string mpath = path + ".squeezed[" + std::to_string(j) + "]";
            const ordered_json& mj = (*arr)[j];
            require_object(mj, mpath);
            reject_unknown_keys(mj, mpath, {"omega", "g", "cc"});
            SqueezedBathMode mode;
            mode.omega = get_number(mj, mpath, "omega");
            mode.g = get_complex(mj, mpath, "g");
            mode.cc = get_complex(mj, mpath, "cc");
            env.squeezed.push_back(mode);
        }
    }
    return env;
}

GaussianModeState parse_initial(const ordered_json& obj, const std::string& path) {
    require_object(obj, path);
    const std::string type = get_string(obj, path, "type");
    GaussianModeState s;
    if (type == "vacuum") {
        reject_unknown_keys(obj, path, {"type"});
    } else if (type == "coherent") {
        reject_unknown_keys(obj, path, {"type", "alpha"});
        const complex alpha = get_complex(obj, path, "alpha");
        s.a = alpha;
        s.aa = alpha * alpha;
        s.n = std::norm(alpha);
    } else if (type == "thermal") {
        reject_unknown_keys(obj, path, {"type", "n"});
        s.n = get_number(obj, path, "n");
        if (s.n < 0.0) config_fail(path + ".n", "thermal occupation must be >= 0");
    } else if (type == "custom") {
        reject_unknown_keys(obj, path, {"type", "a", "aa", "n"});
        s.a = get_complex_or(obj, path, "a", complex(0.0, 0.0));
        s.aa = get_complex_or(obj, path, "aa", complex(0.0, 0.0));
        s.n = get_number(obj, path, "n");
    } else {
        config_fail(path + ".type", "unknown initial state '" + type +
                                        "' (expected vacuum | coherent | thermal | custom)");
    }
    validate_state(s);
    return s;
}

DrivingProtocol parse_driving(const ordered_json& obj, const std::string& path,
                              const TimeGrid& grid, bool has_grid) {
    require_object(obj, path);
    const std::string type = get_string(obj, path, "type");
    if (type == "constant") {
        reject_unknown_keys(obj, path, {"type", "amplitude"});
        return ConstantDrive{get_complex(obj, path, "amplitude")};
    }
    if (type == "monochromatic") {
        reject_unknown_keys(obj, path, {"type", "amplitude", "omega_l"});
        return MonochromaticDrive{get_complex(obj, path, "amplitude"),
                                  get_number(obj, path, "omega_l")};
    }
    if (type == "gaussian_pulse") {
        reject_unknown_keys(obj, path, {"type", "amplitude", "t0", "width", "omega_l"});
        GaussianPulseDrive pulse;
        pulse.amplitude = get_complex(obj, path, "amplitude");
        pulse.t0 = get_number(obj, path, "t0");
        pulse.width = get_number(obj, path, "width");
        pulse.omega_l = get_number_or(obj, path, "omega_l", 0.0);
        if (!(pulse.width > 0.0)) config_fail(path + ".width", "width must be positive");
        return pulse;
    }
    if (type == "sampled") {
        reject_unknown_keys(obj, path, {"type", "csv"});
        if (!has_grid) config_fail(path, "sampled driving needs a grid");
        const std::string file = get_string(obj, path, "csv");
        std::ifstream in(file);
        if (!in) config_fail(path + ".csv", "cannot open '" + file + "'");
        SampledDrive drive;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#') continue;
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream row(line);
            double t = 0.0, re = 0.0, im = 0.0;
            if (!(row >> t >> re >> im))
                config_fail(path + ".csv",
                            "malformed row at line " + std::to_string(lineno) + " of " + file);
            drive.values.emplace_back(re, im);
        }
        if (drive.values.size() != grid.size())
            config_fail(path + ".csv", "expected " + std::to_string(grid.size()) +
                                           " samples (one per grid node), got " +
                                           std::to_string(drive.values.size()));
        return drive;
    }
    config_fail(path + ".type",
                "unknown driving '" + type +
                    "' (expected constant | monochromatic | gaussian_pulse | sampled; "
                    "quadratic driving is unsupported)");
}

}  // namespace

ScenarioConfig parse_config_text(const std::string& text, const std::string& origin) {
    ordered_json root;
    try {
        root = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    require_object(root, origin);
    reject_unknown_keys(root, origin,
                        {"pipeline", "out_dir", "omega0", "lambda", "spectral_density", "cutoff",
                         "grid", "environment", "initial_state", "noise_modes", "green_method",
                         "driving", "oracle", "ness", "sweep", "rc_substeps", "tolerances"});

    ScenarioConfig cfg;
    cfg.pipeline = get_string(root, origin, "pipeline");
    static const std::set<std::string> pipelines = {"simulate", "steady",       "ness",
                                                    "rcmap",    "oracle-check", "sweep"};
    if (!pipelines.count(cfg.pipeline))
        config_fail(origin + ".pipeline",
                    "unknown pipeline '" + cfg.pipeline +
                        "' (expected simulate | steady | ness | rcmap | oracle-check | sweep)");
    cfg.out_dir = get_string_or(root, origin, "out_dir", "");
    cfg.omega0 = get_number_or(root, origin, "omega0", 1.0);
    cfg.lambda = get_number_or(root, origin, "lambda", 1.0);
    if (!(cfg.lambda > 0.0)) config_fail(origin + ".lambda", "lambda must be positive");

    const ordered_json* sd = find_key(root, "spectral_density");
    if (!sd) config_fail(origin, "missing required key 'spectral_density'");
    cfg.J = parse_spectral(*sd, origin + ".spectral_density");

    if (const ordered_json* cut = find_key(root, "cutoff")) {
        require_object(*cut, origin + ".cutoff");
        reject_unknown_keys(*cut, origin + ".cutoff", {"omega_max", "full_axis"});
        cfg.cutoff.omega_max = get_number(*cut, origin + ".cutoff", "omega_max");
        cfg.cutoff.use_full_real_axis = get_bool_or(*cut, origin + ".cutoff", "full_axis", false);
    } else if (!std::holds_alternative<DiscreteSumSpectralDensity>(cfg.J)) {
        // Every continuum density needs a frequency window for the thermal
        // noise integral, flat ones included.
        config_fail(origin, "missing required key 'cutoff' for a continuum spectral density");
    }

    if (const ordered_json* grid = find_key(root, "grid")) {
        cfg.grid = parse_grid(*grid, origin + ".grid");
        cfg.has_grid = true;
    }

    const ordered_json* env = find_key(root, "environment");
    if (!env) config_fail(origin, "missing required key 'environment'");
    cfg.env = parse_environment(*env, origin + ".environment");

    if (const ordered_json* init = find_key(root, "initial_state"))
        cfg.initial = parse_initial(*init, origin + ".initial_state");

    cfg.noise_modes = get_count_or(root, origin, "noise_modes", 2000);
    cfg.green_method = get_string_or(root, origin, "green_method", "auto");
    static const std::set<std::string> methods = {"auto", "volterra", "closed_form"};
    if (!methods.count(cfg.green_method))
        config_fail(origin + ".green_method",
                    "unknown method '" + cfg.green_method +
                        "' (expected auto | volterra | closed_form)");

    if (const ordered_json* drv = find_key(root, "driving"))
        cfg.driving = parse_driving(*drv, origin + ".driving", cfg.grid, cfg.has_grid);

    if (const ordered_json* orc = find_key(root, "oracle")) {
        require_object(*orc, origin + ".oracle");
        reject_unknown_keys(*orc, origin + ".oracle", {"n_modes", "omega_max", "stride"});
        cfg.oracle.n_modes = get_count_or(*orc, origin + ".oracle", "n_modes", 2000);
        cfg.oracle.omega_max = get_number_or(*orc, origin + ".oracle", "omega_max", 0.0);
        cfg.oracle.stride = get_count_or(*orc, origin + ".oracle", "stride", 50);
        if (cfg.oracle.stride == 0)
            config_fail(origin + ".oracle.stride", "stride must be >= 1");
        cfg.has_oracle = true;
    }

    if (const ordered_json* ns = find_key(root, "ness")) {
        require_object(*ns, origin + ".ness");
        reject_unknown_keys(*ns, origin + ".ness", {"sweep_lo", "sweep_hi", "sweep_points"});
        cfg.ness.sweep_lo = get_number_or(*ns, origin + ".ness", "sweep_lo", 0.0);
        cfg.ness.sweep_hi = get_number_or(*ns, origin + ".ness", "sweep_hi", 0.0);
        cfg.ness.sweep_points = get_count_or(*ns, origin + ".ness", "sweep_points", 0);
    }

    if (const ordered_json* sw = find_key(root, "sweep")) {
        require_object(*sw, origin + ".sweep");
        reject_unknown_keys(*sw, origin + ".sweep", {"parameter", "values", "pipeline"});
        SweepSettings sweep;
        sweep.parameter = get_string(*sw, origin + ".sweep", "parameter");
        static const std::set<std::string> params = {"eta",    "gamma0", "delta_det", "beta",
                                                     "lambda", "omega_d", "alpha_d"};
        if (!params.count(sweep.parameter))
            config_fail(origin + ".sweep.parameter",
                        "unknown parameter '" + sweep.parameter +
                            "' (expected eta | gamma0 | delta_det | beta | lambda | omega_d | "
                            "alpha_d)");
        const ordered_json* vals = find_key(*sw, "values");
        if (!vals || !vals->is_array() || vals->empty())
            config_fail(origin + ".sweep.values", "expected a nonempty numeric array");
        for (const auto& v : *vals) {
            if (!v.is_number()) config_fail(origin + ".sweep.values", "expected numbers");
            sweep.values.push_back(v.get<double>());
        }
        sweep.pipeline = get_string(*sw, origin + ".sweep", "pipeline");
        if (!pipelines.count(sweep.pipeline) || sweep.pipeline == "sweep")
            config_fail(origin + ".sweep.pipeline",
                        "inner pipeline must be one of simulate | steady | ness | rcmap | "
                        "oracle-check");
        cfg.sweep = sweep;
    }
    if (cfg.pipeline == "sweep" && !cfg.sweep)
        config_fail(origin, "pipeline 'sweep' needs a 'sweep' block");

    cfg.rc_substeps = static_cast<unsigned>(get_count_or(root, origin, "rc_substeps", 1));
    if (cfg.rc_substeps == 0) config_fail(origin + ".rc_substeps", "must be >= 1");

    if (const ordered_json* tol = find_key(root, "tolerances")) {
        require_object(*tol, origin + ".tolerances");
        for (const auto& item : tol->items()) {
            if (!known_tolerances().count(item.key()))
                config_fail(origin + ".tolerances", "unknown tolerance '" + item.key() + "'");
            if (!item.value().is_number())
                config_fail(origin + ".tolerances." + item.key(), "expected a number");
            cfg.tolerances[item.key()] = item.value().get<double>();
        }
    }
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path);
}

SpectralDensity scaled_density(const SpectralDensity& J, double lambda) {
    if (lambda == 1.0) return J;
    const double l2 = lambda * lambda;
    SpectralDensity out = J;
    if (auto* flat = std::get_if<FlatSpectralDensity>(&out)) {
        flat->gamma0 *= l2;
    } else if (auto* lor = std::get_if<LorentzianSpectralDensity>(&out)) {
        lor->gamma0 *= l2;
    } else if (auto* sum = std::get_if<DiscreteSumSpectralDensity>(&out)) {
        for (auto& m : sum->modes) m.g *= lambda;
    } else if (auto* tab = std::get_if<TabulatedSpectralDensity>(&out)) {
        for (auto& j : tab->j) j *= l2;
    }
    return out;
}

EnvironmentState scaled_environment(const EnvironmentState& env, double lambda) {
    if (lambda == 1.0) return env;
    EnvironmentState out = env;
    for (auto& m : out.displaced) {
        m.g *= lambda;
        m.alpha /= lambda;
    }
    for (auto& m : out.squeezed) {
        m.g *= lambda;
        m.cc /= lambda * lambda;
    }
    return out;
}

double check_tolerance(const ScenarioConfig& cfg, const std::string& profile,
                       const std::string& name, double default_value) {
    const auto it = cfg.tolerances.find(name);
    if (it != cfg.tolerances.end()) return it->second;
    if (profile == "strict") return 0.1 * default_value;
    return default_value;
}

// ---- pipeline plumbing -----------------------------------------------------

namespace {

GreenFunction make_green(const ScenarioConfig& cfg, const SpectralDensity& J_eff) {
    if (!cfg.has_grid) throw ConfigError("this pipeline needs a 'grid' block");
    const bool flat = std::holds_alternative<FlatSpectralDensity>(J_eff);
    const auto* lor = std::get_if<LorentzianSpectralDensity>(&J_eff);

    std::string method = cfg.green_method;
    if (method == "auto") {
        if (flat)
            method = "closed_form";
        else if (lor && cfg.cutoff.use_full_real_axis)
            method = "closed_form";
        else
            method = "volterra";
    }
    if (method == "closed_form") {
        if (flat) return green_flat(std::get<FlatSpectralDensity>(J_eff).gamma0, cfg.omega0,
                                    cfg.grid);
        if (lor) {
            if (!cfg.cutoff.use_full_real_axis)
                throw ConfigError(
                    "green_method closed_form: the lorentzian closed form is the full-axis "
                    "kernel; set cutoff.full_axis = true");
            return green_lorentzian_closed(*lor, cfg.omega0, cfg.grid);
        }
        throw ConfigError("green_method closed_form: no closed form for " +
                          std::string(variant_name(J_eff)));
    }
    if (flat)
        throw ConfigError(
            "green_method volterra: the flat density has a Dirac memory kernel; use "
            "closed_form");
    return solve_volterra(J_eff, cfg.omega0, cfg.grid, cfg.cutoff);
}

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::ofstream open_csv(const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open output file " + file.string());
    return out;
}

void write_green_csv(const std::filesystem::path& dir, const GreenFunction& gf) {
    auto out = open_csv(dir / "green.csv");
    out << "t,re_G,im_G,re_Gdot,im_Gdot\n";
    for (std::size_t k = 0; k < gf.g.size(); ++k)
        out << fmt(gf.grid.t(k)) << ',' << fmt(gf.g[k].real()) << ',' << fmt(gf.g[k].imag())
            << ',' << fmt(gf.gdot[k].real()) << ',' << fmt(gf.gdot[k].imag()) << '\n';
}

void write_coefficients_csv(const std::filesystem::path& dir, const CoefficientSeries& c) {
    auto out = open_csv(dir / "coefficients.csv");
    out << "t,omega_r,gamma,I,N,N_defined,re_F,im_F,re_f,im_f,re_delta,im_delta\n";
    for (std::size_t k = 0; k < c.grid.size(); ++k)
        out << fmt(c.grid.t(k)) << ',' << fmt(c.omega_r[k]) << ',' << fmt(c.gamma[k]) << ','
            << fmt(c.bath_I[k]) << ',' << fmt(c.N[k]) << ',' << unsigned(c.N_defined[k]) << ','
            << fmt(c.F[k].real()) << ',' << fmt(c.F[k].imag()) << ',' << fmt(c.f[k].real())
            << ',' << fmt(c.f[k].imag()) << ',' << fmt(c.delta[k].real()) << ','
            << fmt(c.delta[k].imag()) << '\n';
}

void write_state_csv(const std::filesystem::path& dir, const StateSeries& s,
                     const char* name = "state.csv") {
    auto out = open_csv(dir / name);
    out << "t,re_a,im_a,re_aa,im_aa,n,S\n";
    for (std::size_t k = 0; k < s.a.size(); ++k)
        out << fmt(s.grid.t(k)) << ',' << fmt(s.a[k].real()) << ',' << fmt(s.a[k].imag()) << ','
            << fmt(s.aa[k].real()) << ',' << fmt(s.aa[k].imag()) << ',' << fmt(s.n[k]) << ','
            << fmt(s.entropy[k]) << '\n';
}

void write_thermo_csv(const std::filesystem::path& dir, const ThermoSeries& th) {
    auto out = open_csv(dir / "thermo.csv");
    out << "t,U,W,Q,Qdot_in,Qdot_out,beta_r,beta_r_defined,S,Sigma,sigma\n";
    for (std::size_t k = 0; k < th.grid.size(); ++k)
        out << fmt(th.grid.t(k)) << ',' << fmt(th.U[k]) << ',' << fmt(th.W[k]) << ','
            << fmt(th.Q[k]) << ',' << fmt(th.Qdot_in[k]) << ',' << fmt(th.Qdot_out[k]) << ','
            << fmt(th.beta_r[k]) << ',' << unsigned(th.beta_r_defined[k]) << ',' << fmt(th.S[k])
            << ',' << fmt(th.Sigma[k]) << ',' << fmt(th.sigma[k]) << '\n';
}

ordered_json check_entry(double value, double threshold, bool pass) {
    ordered_json j;
    j["value"] = value;
    j["threshold"] = threshold;
    j["pass"] = pass;
    return j;
}

}  // namespace

SimulationProducts run_simulation(const ScenarioConfig& cfg, unsigned workers) {
    const SpectralDensity J_eff = scaled_density(cfg.J, cfg.lambda);
    const EnvironmentState env_eff = scaled_environment(cfg.env, cfg.lambda);

    SimulationProducts p;
    p.gf = make_green(cfg, J_eff);
    p.coeffs = build_coefficients(J_eff, cfg.cutoff, env_eff, p.gf, cfg.noise_modes, workers);
    p.effective = p.coeffs;

    if (cfg.driving) {
        p.drive = driving_samples(*cfg.driving, cfg.grid);
        p.f_r = renormalized_force(p.gf, p.drive, workers);
        const std::vector<complex> f_drive = driven_displacement(p.gf, p.drive, workers);
        for (std::size_t k = 0; k < p.effective.grid.size(); ++k) {
            p.effective.F[k] += f_drive[k];
            p.effective.f[k] += p.f_r[k];
        }
        p.states = driven_moments(p.gf, p.coeffs, cfg.initial, p.drive, workers);
    } else {
        p.states = propagate_closed_form(p.gf, p.coeffs, cfg.initial);
    }
    p.thermo = build_thermo(p.effective, p.states);
    return p;
}

namespace {

// Shared simulate-pipeline bookkeeping: artifacts plus the check block.
ordered_json simulate_report(const ScenarioConfig& cfg, const SimulationProducts& p,
                             const std::filesystem::path& dir, const std::string& profile) {
    write_green_csv(dir, p.gf);
    write_coefficients_csv(dir, p.effective);
    write_state_csv(dir, p.states);
    write_thermo_csv(dir, p.thermo);

    ordered_json m;
    m["grid"] = {{"dt", cfg.grid.dt}, {"steps", cfg.grid.steps}};
    m["infrared_convergent"] = p.coeffs.infrared_convergent;
    m["beta_r_coverage"] = p.thermo.beta_r_coverage;
    m["sigma_coverage"] = p.thermo.sigma_coverage;

    // First law: Q is defined by closure, so the residual is bitwise zero by
    // construction; the check guards against future regressions of that
    // design decision.
    double first_law = 0.0;
    double du_scale = 1.0;
    for (std::size_t k = 0; k < p.thermo.grid.size(); ++k) {
        const double du = p.thermo.U[k] - p.thermo.U[0];
        du_scale = std::max(du_scale, std::abs(du));
        first_law = std::max(first_law, std::abs(du - p.thermo.W[k] - p.thermo.Q[k]));
    }
    const double tol_fl = check_tolerance(cfg, profile, "first_law", 1e-8);
    m["checks"]["first_law"] = check_entry(first_law, tol_fl * du_scale,
                                           first_law <= tol_fl * du_scale);

    // Gibbs fixed point: meaningful only for an undriven thermal environment.
    const bool thermal =
        cfg.env.displaced.empty() && cfg.env.squeezed.empty() && !cfg.driving.has_value();
    double gibbs_max = 0.0;
    double gamma_n_scale = 1.0;
    std::size_t defined = 0;
    for (std::size_t k = 0; k < p.effective.grid.size(); ++k) {
        const FixedPointResidual r = gibbs_fixed_point_residual(p.effective, k);
        if (!r.defined) continue;
        ++defined;
        gibbs_max = std::max({gibbs_max, r.r_a, r.r_aa, r.r_n});
        gamma_n_scale = std::max(gamma_n_scale, std::abs(p.effective.gamma_N[k]));
    }
    m["gibbs_fixed_point"]["max_residual"] = gibbs_max;
    m["gibbs_fixed_point"]["defined_samples"] = defined;
    m["gibbs_fixed_point"]["applicable"] = thermal;
    if (thermal) {
        const double tol = check_tolerance(cfg, profile, "gibbs_residual", 1e-13);
        m["checks"]["gibbs_fixed_point"] =
            check_entry(gibbs_max, tol * gamma_n_scale, gibbs_max <= tol * gamma_n_scale);
    }

    // Entropy production: record the minimum and the first witness of
    // sigma < -1e-6 (non-Markovian backflow marker).
    double sigma_min = std::numeric_limits<double>::infinity();
    double witness_time = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < p.thermo.grid.size(); ++k) {
        if (!p.thermo.sigma_defined[k]) continue;
        sigma_min = std::min(sigma_min, p.thermo.sigma[k]);
        if (std::isnan(witness_time) && p.thermo.sigma[k] < -1e-6)
            witness_time = p.thermo.grid.t(k);
    }
    if (std::isinf(sigma_min)) sigma_min = std::numeric_limits<double>::quiet_NaN();
    m["sigma_min"] = sigma_min;
    if (!std::isnan(witness_time)) m["sigma_witness_time"] = witness_time;

    // Work ledger headline values.
    const std::size_t last = p.thermo.grid.size() - 1;
    m["final"]["U"] = p.thermo.U[last];
    m["final"]["W"] = p.thermo.W[last];
    m["final"]["Q"] = p.thermo.Q[last];
    m["final"]["S"] = p.thermo.S[last];
    m["final"]["Sigma"] = p.thermo.Sigma[last];
    m["final"]["n"] = p.states.n[last];
    return m;
}

ordered_json pipeline_simulate(const ScenarioConfig& cfg, const std::filesystem::path& dir,
                               unsigned workers, const std::string& profile) {
    const SimulationProducts p = run_simulation(cfg, workers);
    return simulate_report(cfg, p, dir, profile);
}

ordered_json pipeline_steady(const ScenarioConfig& cfg, const std::filesystem::path& dir,
                             unsigned workers, const std::string& profile) {
    const SpectralDensity J_eff = scaled_density(cfg.J, cfg.lambda);
    const SteadyState s = steady_excitation(J_eff, cfg.omega0, cfg.env.beta, cfg.cutoff);

    ordered_json m;
    m["steady"]["n_bar"] = s.n_bar;
    m["steady"]["X"] = s.X;
    m["steady"]["omega_r_bar"] = s.omega_r_bar;
    m["steady"]["gamma_bar"] = s.gamma_bar;
    m["steady"]["beta_r_bar"] = s.beta_r_bar;
    m["steady"]["normalization"] = s.normalization;
    m["steady"]["converged"] = s.converged;

    const double tol_norm = check_tolerance(cfg, profile, "normalization", 1e-3);
    m["checks"]["normalization"] = check_entry(std::abs(s.normalization - 1.0), tol_norm,
                                               std::abs(s.normalization - 1.0) <= tol_norm);

    const double tol_eq = check_tolerance(cfg, profile, "equilibrium_agreement", 1e-3);

    // Long-time route: the noise integral at the end of the grid.
    if (cfg.has_grid) {
        const SimulationProducts p = run_simulation(cfg, workers);
        write_coefficients_csv(dir, p.effective);
        const double n_long = p.coeffs.bath_I[p.coeffs.grid.size() - 1];
        m["steady"]["n_long_time"] = n_long;
        const double diff = std::abs(n_long - s.n_bar);
        m["checks"]["long_time_vs_integral"] = check_entry(diff, tol_eq, diff <= tol_eq);
    }

    // Global-Gibbs oracle route on a positive-axis discretization (negative
    // one-particle frequencies would make the Gibbs state ill-defined).
    if (cfg.has_oracle) {
        const double w_max =
            cfg.oracle.omega_max > 0.0 ? cfg.oracle.omega_max : cfg.cutoff.omega_max;
        const DiscreteSumSpectralDensity bath =
            discretize(J_eff, cfg.oracle.n_modes, FrequencyCutoff{w_max, false});
        const OracleModel model{cfg.omega0, bath};
        const OneParticleSpectrum spectrum = one_particle_spectrum(model);
        const double n_gibbs = oracle_global_gibbs_occupation(spectrum, cfg.env.beta);
        m["steady"]["n_gibbs_oracle"] = n_gibbs;
        const double diff = std::abs(n_gibbs - s.n_bar);
        m["checks"]["gibbs_oracle_vs_integral"] = check_entry(diff, tol_eq, diff <= tol_eq);
    }

    auto out = open_csv(dir / "steady.json");
    out << m["steady"].dump(2) << '\n';
    return m;
}

ordered_json pipeline_ness(const ScenarioConfig& cfg, const std::filesystem::path& dir,
                           unsigned workers, const std::string& profile) {
    const SpectralDensity J_eff = scaled_density(cfg.J, cfg.lambda);
    const EnvironmentState env_eff = scaled_environment(cfg.env, cfg.lambda);
    if (env_eff.displaced.empty())
        throw std::invalid_argument("ness pipeline: needs at least one displaced bath mode");

    const SteadyState s = steady_excitation(J_eff, cfg.omega0, cfg.env.beta, cfg.cutoff);
    const std::vector<complex> phi =
        ness_displacement_weights(J_eff, cfg.omega0, cfg.cutoff, env_eff.displaced);

    ordered_json m;
    m["steady"]["n_bar"] = s.n_bar;
    m["steady"]["omega_r_bar"] = s.omega_r_bar;
    m["steady"]["gamma_bar"] = s.gamma_bar;
    m["steady"]["beta_r_bar"] = s.beta_r_bar;

    ordered_json report;  // the NESS JSON artifact
    report["phi"] = ordered_json::array();
    for (std::size_t j = 0; j < phi.size(); ++j)
        report["phi"].push_back({{"omega", env_eff.displaced[j].omega},
                                 {"re", phi[j].real()},
                                 {"im", phi[j].imag()}});

    if (env_eff.displaced.size() == 1) {
        const NessFluxes flux =
            ness_fluxes_single_mode(J_eff, cfg.omega0, cfg.cutoff, s, env_eff.displaced[0]);
        report["Ubar"] = flux.U_bar;
        report["Qdot"] = flux.Qdot;
        report["Wdot"] = flux.Wdot;
        report["sigmadot"] = flux.sigmadot;

        const double tol_bal = check_tolerance(cfg, profile, "ness_balance", 1e-6);
        const double balance = std::abs(flux.Qdot + flux.Wdot);
        m["checks"]["flux_balance"] = check_entry(balance, tol_bal, balance <= tol_bal);
        const double sig_vs_q = std::abs(flux.sigmadot + s.beta_r_bar * flux.Qdot);
        m["checks"]["sigma_vs_heat"] = check_entry(sig_vs_q, tol_bal, sig_vs_q <= tol_bal);
        m["checks"]["sigma_nonnegative"] =
            check_entry(flux.sigmadot, 0.0, flux.sigmadot >= 0.0);
    } else {
        report["note"] = "multi-mode asymptotics: constant-flux bookkeeping needs one mode";
    }

    // Resonance sweep of the entropy production rate.
    if (cfg.ness.sweep_points >= 2) {
        const DisplacedBathMode& d0 = env_eff.displaced[0];
        std::vector<double> grid_wd(cfg.ness.sweep_points);
        const double step =
            (cfg.ness.sweep_hi - cfg.ness.sweep_lo) / double(cfg.ness.sweep_points - 1);
        for (std::size_t k = 0; k < grid_wd.size(); ++k)
            grid_wd[k] = cfg.ness.sweep_lo + double(k) * step;
        const auto sweep = ness_resonance_sweep(J_eff, cfg.omega0, cfg.cutoff, s,
                                                std::abs(d0.g), std::abs(d0.alpha), grid_wd);
        report["resonance_sweep"] = ordered_json::array();
        double best = -1.0;
        double best_wd = grid_wd.front();
        for (const auto& pt : sweep) {
            report["resonance_sweep"].push_back({{"omega_d", pt.omega_d},
                                                 {"sigmadot", pt.sigmadot}});
            if (pt.sigmadot > best) {
                best = pt.sigmadot;
                best_wd = pt.omega_d;
            }
        }
        m["resonance"]["peak_omega_d"] = best_wd;
        m["resonance"]["grid_step"] = step;
        try {
            const double root = resonance_frequency(J_eff, cfg.omega0, cfg.cutoff,
                                                    cfg.ness.sweep_lo, cfg.ness.sweep_hi);
            m["resonance"]["condition_root"] = root;
            m["checks"]["resonance_peak"] = check_entry(std::abs(best_wd - root), step,
                                                        std::abs(best_wd - root) <= step);
        } catch (const std::invalid_argument&) {
            m["resonance"]["condition_root"] = nullptr;
        }
    }

    // Transient route: enter the decayed-G regime and compare against the
    // asymptotic series.
    if (cfg.has_grid) {
        const SimulationProducts p = run_simulation(cfg, workers);
        write_state_csv(dir, p.states);
        write_green_csv(dir, p.gf);

        std::size_t k_decay = p.gf.g.size();
        for (std::size_t k = 0; k < p.gf.g.size(); ++k)
            if (std::abs(p.gf.g[k]) < 1e-6) {
                k_decay = k;
                break;
            }
        m["decayed_G_reached"] = k_decay < p.gf.g.size();
        if (k_decay < p.gf.g.size()) {
            m["decayed_G_time"] = p.gf.grid.t(k_decay);
            double dev_f = 0.0, dev_aa = 0.0, dev_n = 0.0;
            double ent_lo = std::numeric_limits<double>::infinity();
            double ent_hi = -ent_lo;
            for (std::size_t k = k_decay; k < p.states.a.size(); ++k) {
                const double t = p.states.grid.t(k);
                const complex fbar = ness_displacement(env_eff.displaced, phi, t);
                dev_f = std::max(dev_f, std::abs(p.states.a[k] - fbar));
                dev_aa = std::max(dev_aa, std::abs(p.states.aa[k] - fbar * fbar));
                dev_n = std::max(dev_n,
                                 std::abs(p.states.n[k] - (s.n_bar + std::norm(fbar))));
                ent_lo = std::min(ent_lo, p.states.entropy[k]);
                ent_hi = std::max(ent_hi, p.states.entropy[k]);
            }
            const double tol_conv = check_tolerance(cfg, profile, "ness_convergence", 1e-3);
            m["checks"]["displacement_convergence"] =
                check_entry(dev_f, tol_conv, dev_f <= tol_conv);
            m["checks"]["anomalous_convergence"] =
                check_entry(dev_aa, tol_conv, dev_aa <= tol_conv);
            m["checks"]["occupation_convergence"] =
                check_entry(dev_n, tol_conv, dev_n <= tol_conv);
            const double tol_ent = check_tolerance(cfg, profile, "entropy_constancy", 1e-6);
            m["checks"]["entropy_constancy"] =
                check_entry(ent_hi - ent_lo, tol_ent, ent_hi - ent_lo <= tol_ent);
        }

        // Long-time moment equations on the asymptotic series themselves.
        std::vector<double> probe;
        const double period = 2.0 * M_PI / std::max(std::abs(env_eff.displaced[0].omega), 1e-6);
        for (int k = 0; k < 64; ++k) probe.push_back(double(k) * period / 64.0);
        const NessResiduals res = verify_ness_unitarity(s, env_eff.displaced, phi, probe);
        m["ness_moment_residuals"] = {{"first_moment", res.first_moment},
                                      {"anomalous", res.anomalous},
                                      {"occupation", res.occupation}};
    }

    auto out = open_csv(dir / "ness.json");
    out << report.dump(2) << '\n';
    m["report"] = report;
    return m;
}

ordered_json pipeline_rcmap(const ScenarioConfig& cfg, const std::filesystem::path& dir,
                            unsigned workers, const std::string& profile) {
    const SpectralDensity J_eff = scaled_density(cfg.J, cfg.lambda);
    const RcModel model = map_spectral_density(J_eff, cfg.env.beta);

    ordered_json m;
    m["rc_model"]["g"] = model.g;
    m["rc_model"]["omega_rc"] = model.omega_rc;
    m["rc_model"]["gamma0_residual"] = model.gamma0_residual;
    m["rc_model"]["W_plus"] = model.W_plus;
    m["rc_model"]["W_minus"] = model.W_minus;

    const auto& lor = std::get<LorentzianSpectralDensity>(J_eff);
    const double g2_err = std::abs(model.g * model.g - 0.5 * lor.gamma0 * lor.eta);
    m["checks"]["coupling_weight"] = check_entry(g2_err, 1e-14, g2_err <= 1e-14);
    const double rate_err = std::abs(model.W_minus - model.W_plus - model.gamma0_residual);
    m["checks"]["rate_difference"] = check_entry(rate_err, 1e-12, rate_err <= 1e-12);

    // Exact route and RC route on the same grid.
    const SimulationProducts p = run_simulation(cfg, workers);
    write_state_csv(dir, p.states, "state_exact.csv");
    const RcState init = rc_initial_state(model, cfg.initial);
    const RcSeries rc = simulate_rc(model, cfg.omega0, init, cfg.grid, cfg.rc_substeps);
    write_state_csv(dir, rc.central, "state_rc.csv");

    const MomentDeviation dev = moment_deviation(p.states, rc.central);
    double scale_a = 0.0, scale_aa = 0.0, scale_n = 0.0;
    for (std::size_t k = 0; k < p.states.a.size(); ++k) {
        scale_a = std::max(scale_a, std::abs(p.states.a[k]));
        scale_aa = std::max(scale_aa, std::abs(p.states.aa[k]));
        scale_n = std::max(scale_n, std::abs(p.states.n[k]));
    }
    const double rel_a = dev.max_a / std::max(scale_a, 1e-12);
    const double rel_aa = dev.max_aa / std::max(scale_aa, 1e-12);
    const double rel_n = dev.max_n / std::max(scale_n, 1e-12);
    m["deviation"] = {{"max_a", dev.max_a},   {"max_aa", dev.max_aa}, {"max_n", dev.max_n},
                      {"l2_a", dev.l2_a},     {"l2_aa", dev.l2_aa},   {"l2_n", dev.l2_n},
                      {"rel_a", rel_a},       {"rel_aa", rel_aa},     {"rel_n", rel_n}};
    const double tol_rc = check_tolerance(cfg, profile, "rc_deviation", 5e-2);
    const double rel_worst = std::max({rel_a, rel_aa, rel_n});
    m["checks"]["rc_vs_exact"] = check_entry(rel_worst, tol_rc, rel_worst <= tol_rc);

    // Joint Gaussian positivity along the trajectory.
    double nu_min = std::numeric_limits<double>::infinity();
    for (const auto& st : rc.joint) {
        const auto nus = rc_symplectic_eigenvalues(st);
        nu_min = std::min(nu_min, nus[1]);
    }
    m["joint_nu_min"] = nu_min;
    m["checks"]["joint_positivity"] =
        check_entry(nu_min, 0.5 - 1e-9, nu_min >= 0.5 - 1e-9);
    return m;
}

ordered_json pipeline_oracle_check(const ScenarioConfig& cfg, const std::filesystem::path& dir,
                                   unsigned workers, const std::string& profile) {
    if (!cfg.has_grid) throw ConfigError("oracle-check needs a 'grid' block");
    const SpectralDensity J_eff = scaled_density(cfg.J, cfg.lambda);
    const EnvironmentState env_eff = scaled_environment(cfg.env, cfg.lambda);

    // Both routes run on the same finite bath, so the only daylight between
    // them is the reduced-dynamics machinery itself.
    DiscreteSumSpectralDensity bath;
    if (const auto* sum = std::get_if<DiscreteSumSpectralDensity>(&J_eff)) {
        bath = *sum;
    } else {
        const double w_max =
            cfg.oracle.omega_max > 0.0 ? cfg.oracle.omega_max : cfg.cutoff.omega_max;
        bath = discretize(J_eff, cfg.oracle.n_modes,
                          FrequencyCutoff{w_max, cfg.cutoff.use_full_real_axis});
    }
    const double t_rec = recurrence_time(bath);

    // Environment specials live on actual bath modes: each configured mode is
    // snapped to the nearest discretized frequency and inherits its coupling.
    EnvironmentState env_discrete;
    env_discrete.beta = env_eff.beta;
    OracleInitialState oinit;
    oinit.a = cfg.initial.a;
    oinit.aa = cfg.initial.aa;
    oinit.n = cfg.initial.n;
    oinit.beta = env_eff.beta;
    auto nearest = [&bath](double omega) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < bath.modes.size(); ++j) {
            const double d = std::abs(bath.modes[j].omega - omega);
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        return best;
    };
    for (const auto& mode : env_eff.displaced) {
        const std::size_t j = nearest(mode.omega);
        env_discrete.displaced.push_back(
            {bath.modes[j].omega, bath.modes[j].g, mode.alpha});
        oinit.displaced.emplace_back(j, mode.alpha);
    }
    for (const auto& mode : env_eff.squeezed) {
        const std::size_t j = nearest(mode.omega);
        env_discrete.squeezed.push_back({bath.modes[j].omega, bath.modes[j].g, mode.cc});
        oinit.squeezed.emplace_back(j, mode.cc);
    }

    // Reduced route.
    const SpectralDensity J_discrete = bath;
    GreenFunction gf = solve_volterra(J_discrete, cfg.omega0, cfg.grid, cfg.cutoff);
    CoefficientSeries coeffs =
        build_coefficients(J_discrete, cfg.cutoff, env_discrete, gf, cfg.noise_modes, workers);
    StateSeries states = propagate_closed_form(gf, coeffs, cfg.initial);

    // Oracle route at strobe times.
    const OracleModel model{cfg.omega0, bath};
    const OneParticleSpectrum spectrum = one_particle_spectrum(model);
    std::vector<double> times;
    std::vector<std::size_t> nodes;
    for (std::size_t k = 0; k < cfg.grid.size(); k += cfg.oracle.stride) {
        nodes.push_back(k);
        times.push_back(cfg.grid.t(k));
    }
    const std::vector<complex> g_oracle = oracle_green(spectrum, times);
    const OracleMomentSeries moments = oracle_moments(spectrum, model, oinit, times, workers);

    double dev_g = 0.0, dev_a = 0.0, dev_aa = 0.0, dev_n = 0.0;
    {
        auto out = open_csv(dir / "oracle.csv");
        out << "t,re_G_tcl,im_G_tcl,re_G_oracle,im_G_oracle,re_a_tcl,im_a_tcl,re_a_oracle,"
               "im_a_oracle,re_aa_tcl,im_aa_tcl,re_aa_oracle,im_aa_oracle,n_tcl,n_oracle\n";
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const std::size_t k = nodes[i];
            out << fmt(times[i]) << ',' << fmt(gf.g[k].real()) << ',' << fmt(gf.g[k].imag())
                << ',' << fmt(g_oracle[i].real()) << ',' << fmt(g_oracle[i].imag()) << ','
                << fmt(states.a[k].real()) << ',' << fmt(states.a[k].imag()) << ','
                << fmt(moments.a[i].real()) << ',' << fmt(moments.a[i].imag()) << ','
                << fmt(states.aa[k].real()) << ',' << fmt(states.aa[k].imag()) << ','
                << fmt(moments.aa[i].real()) << ',' << fmt(moments.aa[i].imag()) << ','
                << fmt(states.n[k]) << ',' << fmt(moments.n[i]) << '\n';
            if (times[i] < 0.5 * t_rec) {
                dev_g = std::max(dev_g, std::abs(gf.g[k] - g_oracle[i]));
                dev_a = std::max(dev_a, std::abs(states.a[k] - moments.a[i]));
                dev_aa = std::max(dev_aa, std::abs(states.aa[k] - moments.aa[i]));
                dev_n = std::max(dev_n, std::abs(states.n[k] - moments.n[i]));
            }
        }
    }

    ordered_json m;
    m["bath_modes"] = bath.modes.size();
    m["recurrence_time"] = t_rec;
    m["compared_below"] = 0.5 * t_rec;
    m["deviation"] = {{"G", dev_g}, {"a", dev_a}, {"aa", dev_aa}, {"n", dev_n}};
    const double tol_g = check_tolerance(cfg, profile, "oracle_green", 1e-4);
    const double tol_m = check_tolerance(cfg, profile, "oracle_moments", 1e-4);
    m["checks"]["green_vs_oracle"] = check_entry(dev_g, tol_g, dev_g <= tol_g);
    const double dev_moments = std::max({dev_a, dev_aa, dev_n});
    m["checks"]["moments_vs_oracle"] = check_entry(dev_moments, tol_m, dev_moments <= tol_m);
    return m;
}

ScenarioConfig apply_sweep_value(const ScenarioConfig& base, const std::string& parameter,
                                 double value) {
    ScenarioConfig cfg = base;
    cfg.sweep.reset();
    cfg.pipeline = base.sweep->pipeline;
    if (parameter == "eta" || parameter == "gamma0" || parameter == "delta_det") {
        auto* lor = std::get_if<LorentzianSpectralDensity>(&cfg.J);
        if (parameter == "gamma0") {
            if (auto* flat = std::get_if<FlatSpectralDensity>(&cfg.J)) {
                flat->gamma0 = value;
                return cfg;
            }
        }
        if (!lor)
            throw ConfigError("sweep." + parameter + " needs a lorentzian spectral density");
        if (parameter == "eta")
            lor->eta = value;
        else if (parameter == "gamma0")
            lor->gamma0 = value;
        else
            lor->omega_c = cfg.omega0 - value;  // detuning Delta = omega0 - omega_c
        return cfg;
    }
    if (parameter == "beta") {
        cfg.env.beta = value;
        return cfg;
    }
    if (parameter == "lambda") {
        cfg.lambda = value;
        return cfg;
    }
    if (parameter == "omega_d" || parameter == "alpha_d") {
        if (cfg.env.displaced.size() != 1)
            throw ConfigError("sweep." + parameter + " needs exactly one displaced mode");
        if (parameter == "omega_d") {
            cfg.env.displaced[0].omega = value;
        } else {
            const complex a0 = cfg.env.displaced[0].alpha;
            const double mag = std::abs(a0);
            cfg.env.displaced[0].alpha = mag > 0.0 ? a0 * (value / mag) : complex(value, 0.0);
        }
        return cfg;
    }
    throw ConfigError("sweep.parameter: unknown parameter '" + parameter + "'");
}

ordered_json execute_pipeline(const ScenarioConfig& cfg, const std::filesystem::path& dir,
                              unsigned workers, const std::string& profile);

ordered_json pipeline_sweep(const ScenarioConfig& cfg, const std::filesystem::path& dir,
                            unsigned workers, const std::string& profile) {
    const SweepSettings& sweep = *cfg.sweep;
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < sweep.values.size(); ++i) {
        const double value = sweep.values[i];
        char tag[32];
        std::snprintf(tag, sizeof tag, "point_%03zu", i);
        const std::filesystem::path sub = dir / tag;
        std::filesystem::create_directories(sub);
        ordered_json row;
        row["parameter"] = sweep.parameter;
        row["value"] = value;
        row["dir"] = tag;
        try {
            const ScenarioConfig point = apply_sweep_value(cfg, sweep.parameter, value);
            const ordered_json inner = execute_pipeline(point, sub, workers, profile);
            {
                auto out = open_csv(sub / "manifest.json");
                out << inner.dump(2) << '\n';
            }
            // Headline scalars when the inner pipeline provides them.
            for (const char* key :
                 {"steady", "deviation", "final", "resonance", "sigma_min"}) {
                if (inner.contains(key)) row[key] = inner.at(key);
            }
            bool all_pass = true;
            if (inner.contains("checks"))
                for (const auto& c : inner.at("checks").items())
                    all_pass = all_pass && c.value().value("pass", false);
            row["pass"] = all_pass;
        } catch (const std::exception& e) {
            row["error"] = e.what();  // recorded; the sweep continues
        }
        rows.push_back(row);
    }
    ordered_json m;
    m["sweep"] = {{"parameter", sweep.parameter}, {"pipeline", sweep.pipeline}};
    m["points"] = rows;
    auto out = open_csv(dir / "sweep.json");
    out << m.dump(2) << '\n';
    return m;
}

ordered_json execute_pipeline(const ScenarioConfig& cfg, const std::filesystem::path& dir,
                              unsigned workers, const std::string& profile) {
    if (cfg.pipeline == "simulate") return pipeline_simulate(cfg, dir, workers, profile);
    if (cfg.pipeline == "steady") return pipeline_steady(cfg, dir, workers, profile);
    if (cfg.pipeline == "ness") return pipeline_ness(cfg, dir, workers, profile);
    if (cfg.pipeline == "rcmap") return pipeline_rcmap(cfg, dir, workers, profile);
    if (cfg.pipeline == "oracle-check") return pipeline_oracle_check(cfg, dir, workers, profile);
    if (cfg.pipeline == "sweep") return pipeline_sweep(cfg, dir, workers, profile);
    throw ConfigError("unknown pipeline '" + cfg.pipeline + "'");
}

}  // namespace

int run_scenario(const ScenarioConfig& cfg, const std::string& out_dir, unsigned workers,
                 const std::string& tolerance_profile) {
    if (tolerance_profile != "default" && tolerance_profile != "strict")
        throw ConfigError("tolerance profile must be 'default' or 'strict', got '" +
                          tolerance_profile + "'");
    const std::filesystem::path dir = out_dir.empty() ? cfg.out_dir : out_dir;
    if (dir.empty()) throw ConfigError("no output directory (config out_dir or --out)");
    std::filesystem::create_directories(dir);

    ordered_json manifest;
    manifest["pipeline"] = cfg.pipeline;
    manifest["tolerance_profile"] = tolerance_profile;
    int code = 0;
    try {
        const ordered_json body = execute_pipeline(cfg, dir, workers, tolerance_profile);
        for (const auto& item : body.items()) manifest[item.key()] = item.value();
    } catch (const ConfigError& e) {
        manifest["error"] = e.what();
        code = 2;
    } catch (const std::invalid_argument& e) {
        manifest["error"] = e.what();
        code = 2;
    } catch (const std::exception& e) {
        manifest["error"] = e.what();
        code = 3;
    }
    auto out = open_csv(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
    return code;
}

int run_scenario_file(const std::string& config_path, const std::string& out_dir,
                      unsigned workers, const std::string& tolerance_profile,
                      std::string* error_message) {
    try {
        const ScenarioConfig cfg = load_config(config_path);
        const int code = run_scenario(cfg, out_dir, workers, tolerance_profile);
        if (code != 0 && error_message)
            *error_message = "pipeline failed; see manifest.json in the output directory";
        return code;
    } catch (const ConfigError& e) {
        if (error_message) *error_message = e.what();
        return 2;
    } catch (const std::invalid_argument& e) {
        if (error_message) *error_message = e.what();
        return 2;
    } catch (const std::exception& e) {
        if (error_message) *error_message = e.what();
        return 3;
    }
}

}  // namespace fano
