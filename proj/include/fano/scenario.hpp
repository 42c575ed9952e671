#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fano/coefficients.hpp"
#include "fano/driving.hpp"
#include "fano/dynamics.hpp"
#include "fano/green.hpp"
#include "fano/spectral.hpp"
#include "fano/steady.hpp"
#include "fano/thermo.hpp"
#include "fano/types.hpp"

namespace fano {

// Schema violations carry the offending key path in the message.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct OracleSettings {
    std::size_t n_modes{2000};
    double omega_max{0.0};  // 0 -> inherit the cutoff window
    std::size_t stride{50};
};

struct NessSettings {
    double sweep_lo{0.0};
    double sweep_hi{0.0};
    std::size_t sweep_points{0};
};

struct SweepSettings {
    std::string parameter;  // eta | gamma0 | delta_det | beta | lambda | omega_d | alpha_d
    std::vector<double> values;
    std::string pipeline;
};

// One scenario = one config file.  Frequencies are in units of omega0 = 1 by
// default; lambda is a global coupling scale (J -> lambda^2 J, displaced
// alpha -> alpha / lambda, squeezed <<bb>> -> <<bb>> / lambda^2) so that the
// semiclassical drive survives the weak-coupling limit.
struct ScenarioConfig {
    std::string pipeline;
    std::string out_dir;
    double omega0{1.0};
    double lambda{1.0};
    SpectralDensity J{FlatSpectralDensity{}};
    FrequencyCutoff cutoff{};
    TimeGrid grid{};
    bool has_grid{false};
    EnvironmentState env{};
    GaussianModeState initial{};
    std::size_t noise_modes{2000};
    std::string green_method{"auto"};  // auto | volterra | closed_form
    std::optional<DrivingProtocol> driving;
    OracleSettings oracle{};
    bool has_oracle{false};
    NessSettings ness{};
    std::optional<SweepSettings> sweep;
    unsigned rc_substeps{1};
    std::map<std::string, double> tolerances;
};

ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config_text(const std::string& text, const std::string& origin);

// Coupling-scaled views used by every pipeline.
SpectralDensity scaled_density(const SpectralDensity& J, double lambda);
EnvironmentState scaled_environment(const EnvironmentState& env, double lambda);

// Check threshold resolution: config overrides win, then the profile
// ("strict" tightens the default tenfold, "default" keeps it).
double check_tolerance(const ScenarioConfig& cfg, const std::string& profile,
                       const std::string& name, double default_value);

// The shared transient pipeline: propagator, coefficients, moments, ledger.
// When a drive is present, `effective` carries the total (F, f) with the
// drive folded in and is what the thermodynamic ledger sees.
struct SimulationProducts {
    GreenFunction gf;
    CoefficientSeries coeffs;
    CoefficientSeries effective;
    StateSeries states;
    ThermoSeries thermo;
    std::vector<complex> drive;
    std::vector<complex> f_r;
};

SimulationProducts run_simulation(const ScenarioConfig& cfg, unsigned workers);

// Executes cfg.pipeline and writes artifacts plus manifest.json under
// out_dir. Exit code 0 = success, 2 = config error, 3 = runtime (physics)
// error; on 3 the partial artifacts are kept and the manifest carries an
// "error" marker.
int run_scenario(const ScenarioConfig& cfg, const std::string& out_dir, unsigned workers,
                 const std::string& tolerance_profile);

// Convenience wrapper: load + run, collecting any diagnostic in
// error_message (when non-null) instead of throwing.
int run_scenario_file(const std::string& config_path, const std::string& out_dir,
                      unsigned workers, const std::string& tolerance_profile,
                      std::string* error_message);

}  // namespace fano
