#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "fano/scenario.hpp"

using namespace fano;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "fano_scenario_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& file, const std::string& text) {
    std::ofstream out(file);
    REQUIRE(bool(out));
    out << text;
}

std::string read_text(const fs::path& file) {
    std::ifstream in(file);
    REQUIRE(bool(in));
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string first_line(const fs::path& file) {
    std::ifstream in(file);
    REQUIRE(bool(in));
    std::string line;
    std::getline(in, line);
    return line;
}

nlohmann::json manifest_of(const fs::path& dir) {
    return nlohmann::json::parse(read_text(dir / "manifest.json"));
}

const char* kSimulateSmoke = R"({
  "pipeline": "simulate",
  "spectral_density": {"type": "flat", "gamma0": 0.4},
  "cutoff": {"omega_max": 30.0},
  "grid": {"dt": 0.01, "steps": 300},
  "environment": {"beta": 1.2},
  "initial_state": {"type": "coherent", "alpha": [0.6, 0.0]},
  "noise_modes": 400
})";

}  // namespace

TEST_CASE("config schema violations carry the offending key path") {
    auto parse = [](const std::string& text) { return parse_config_text(text, "cfg"); };

    CHECK_THROWS_AS(parse("not json"), ConfigError);
    CHECK_THROWS_AS(parse("[1, 2]"), ConfigError);

    // Unknown keys are rejected at every level.
    CHECK_THROWS_WITH_AS(parse(R"({"pipeline": "simulate", "typo_key": 1,
        "spectral_density": {"type": "flat", "gamma0": 0.1},
        "cutoff": {"omega_max": 5}, "environment": {"beta": 1}})"),
                         doctest::Contains("unknown key 'typo_key'"), ConfigError);
    CHECK_THROWS_WITH_AS(parse(R"({"pipeline": "simulate",
        "spectral_density": {"type": "lorentzian", "gamma0": 0.1, "eta": 0.2, "omega_c": 1,
                             "width": 0.5},
        "cutoff": {"omega_max": 5}, "environment": {"beta": 1}})"),
                         doctest::Contains("unknown key 'width'"), ConfigError);

    CHECK_THROWS_WITH_AS(parse(R"({"pipeline": "warp",
        "spectral_density": {"type": "flat", "gamma0": 0.1},
        "cutoff": {"omega_max": 5}, "environment": {"beta": 1}})"),
                         doctest::Contains("unknown pipeline"), ConfigError);

    CHECK_THROWS_WITH_AS(parse(R"({"pipeline": "simulate",
        "cutoff": {"omega_max": 5}, "environment": {"beta": 1}})"),
                         doctest::Contains("spectral_density"), ConfigError);
    CHECK_THROWS_WITH_AS(parse(R"({"pipeline": "simulate",
        "spectral_density": {"type": "boxcar"},
        "cutoff": {"omega_max": 5}, "environment": {"beta": 1}})"),
                         doctest::Contains("unknown spectral density"), ConfigError);

    // Every continuum density needs a cutoff window.
    CHECK_THROWS_WITH_AS(parse(R"({"pipeline": "simulate",
        "spectral_density": {"type": "flat", "gamma0": 0.1},
        "environment": {"beta": 1}})"),
                         doctest::Contains("cutoff"), ConfigError);

    CHECK_THROWS_WITH_AS(parse(R"({"pipeline": "simulate",
        "spectral_density": {"type": "flat", "gamma0": 0.1},
        "cutoff": {"omega_max": 5}})"),
                         doctest::Contains("environment"), ConfigError);

    // beta: positive number or the string "inf", nothing else.
    CHECK_THROWS_WITH_AS(parse(R"({"pipeline": "simulate",
        "spectral_density": {"type": "flat", "gamma0": 0.1},
        "cutoff": {"omega_max": 5}, "environment": {"beta": 0.0}})"),
                         doctest::Contains("beta must be positive"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"pipeline": "simulate",
        "spectral_density": {"type": "flat", "gamma0": 0.1},
        "cutoff": {"omega_max": 5}, "environment": {"beta": "cold"}})"),
                    ConfigError);

    CHECK_THROWS_WITH_AS(parse(R"({"pipeline": "simulate", "lambda": -0.5,
        "spectral_density": {"type": "flat", "gamma0": 0.1},
        "cutoff": {"omega_max": 5}, "environment": {"beta": 1}})"),
                         doctest::Contains("lambda"), ConfigError);

    CHECK_THROWS_WITH_AS(parse(R"({"pipeline": "simulate",
        "spectral_density": {"type": "flat", "gamma0": 0.1},
        "cutoff": {"omega_max": 5}, "grid": {"dt": -0.1, "steps": 10},
        "environment": {"beta": 1}})"),
                         doctest::Contains("dt must be positive"), ConfigError);

    CHECK_THROWS_WITH_AS(parse(R"({"pipeline": "simulate", "green_method": "magic",
        "spectral_density": {"type": "flat", "gamma0": 0.1},
        "cutoff": {"omega_max": 5}, "environment": {"beta": 1}})"),
                         doctest::Contains("green_method"), ConfigError);

    CHECK_THROWS_WITH_AS(parse(R"({"pipeline": "simulate",
        "spectral_density": {"type": "flat", "gamma0": 0.1},
        "cutoff": {"omega_max": 5}, "environment": {"beta": 1},
        "oracle": {"stride": 0}})"),
                         doctest::Contains("stride"), ConfigError);

    CHECK_THROWS_WITH_AS(parse(R"({"pipeline": "simulate",
        "spectral_density": {"type": "flat", "gamma0": 0.1},
        "cutoff": {"omega_max": 5}, "environment": {"beta": 1},
        "tolerances": {"no_such_check": 1e-3}})"),
                         doctest::Contains("unknown tolerance"), ConfigError);

    // An unphysical custom initial state fails Gaussian-state validation.
    CHECK_THROWS_AS(parse(R"({"pipeline": "simulate",
        "spectral_density": {"type": "flat", "gamma0": 0.1},
        "cutoff": {"omega_max": 5}, "environment": {"beta": 1},
        "initial_state": {"type": "custom", "aa": [0.9, 0.0], "n": 0.5}})"),
                    std::invalid_argument);

    // Sweep validation: parameter whitelist, nonempty values, no nesting.
    const std::string sweep_head = R"({"pipeline": "sweep",
        "spectral_density": {"type": "lorentzian", "gamma0": 0.5, "eta": 0.1, "omega_c": 1.0},
        "cutoff": {"omega_max": 6, "full_axis": true}, "environment": {"beta": 1},)";
    CHECK_THROWS_WITH_AS(parse(sweep_head + R"("sweep": {"parameter": "speed",
        "values": [1.0], "pipeline": "steady"}})"),
                         doctest::Contains("unknown parameter"), ConfigError);
    CHECK_THROWS_WITH_AS(parse(sweep_head + R"("sweep": {"parameter": "eta",
        "values": [], "pipeline": "steady"}})"),
                         doctest::Contains("values"), ConfigError);
    CHECK_THROWS_WITH_AS(parse(sweep_head + R"("sweep": {"parameter": "eta",
        "values": [0.1], "pipeline": "sweep"}})"),
                         doctest::Contains("inner pipeline"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse(R"({"pipeline": "sweep",
        "spectral_density": {"type": "flat", "gamma0": 0.1},
        "cutoff": {"omega_max": 5}, "environment": {"beta": 1}})"),
        doctest::Contains("needs a 'sweep' block"), ConfigError);
}

TEST_CASE("sampled driving validates its csv against the grid") {
    const fs::path dir = fresh_dir("sampled_drive");
    const fs::path csv = dir / "drive.csv";

    const std::string head = R"({"pipeline": "simulate",
        "spectral_density": {"type": "flat", "gamma0": 0.1},
        "cutoff": {"omega_max": 5}, "grid": {"dt": 0.1, "steps": 10},
        "environment": {"beta": 1},
        "driving": {"type": "sampled", "csv": ")" +
                             csv.string() + R"("}})";

    write_text(csv, "0.0,0.1,0.0\n0.1,0.1,0.0\n0.2,0.1,0.0\n");
    CHECK_THROWS_WITH_AS(parse_config_text(head, "cfg"), doctest::Contains("11 samples"),
                         ConfigError);

    write_text(csv, "0.0,abc,0.0\n");
    CHECK_THROWS_WITH_AS(parse_config_text(head, "cfg"), doctest::Contains("malformed row"),
                         ConfigError);

    std::string good = "# t, re, im\n";
    for (int k = 0; k <= 10; ++k)
        good += std::to_string(0.1 * k) + ",0.25,-0.1\n";
    write_text(csv, good);
    const ScenarioConfig cfg = parse_config_text(head, "cfg");
    REQUIRE(cfg.driving.has_value());
    const auto* sampled = std::get_if<SampledDrive>(&*cfg.driving);
    REQUIRE(sampled != nullptr);
    CHECK(sampled->values.size() == 11);
    CHECK(sampled->values[4] == complex(0.25, -0.1));
}

TEST_CASE("defaults and typed fields round-trip through the parser") {
    const ScenarioConfig cfg = parse_config_text(R"({
        "pipeline": "simulate",
        "spectral_density": {"type": "flat", "gamma0": 0.4},
        "cutoff": {"omega_max": 30.0},
        "grid": {"dt": 0.01, "steps": 300},
        "environment": {"beta": "inf"},
        "initial_state": {"type": "coherent", "alpha": [0.6, -0.2]}
    })",
                                                 "cfg");
    CHECK(cfg.omega0 == 1.0);
    CHECK(cfg.lambda == 1.0);
    CHECK(cfg.noise_modes == 2000);
    CHECK(cfg.green_method == "auto");
    CHECK(std::isinf(cfg.env.beta));
    CHECK(cfg.has_grid);
    CHECK(cfg.grid.dt == 0.01);
    CHECK(cfg.grid.steps == 300);
    CHECK_FALSE(cfg.cutoff.use_full_real_axis);
    const complex alpha{0.6, -0.2};
    CHECK(cfg.initial.a == alpha);
    CHECK(cfg.initial.aa == alpha * alpha);
    CHECK(cfg.initial.n == std::norm(alpha));
    CHECK_FALSE(cfg.driving.has_value());
    CHECK_FALSE(cfg.has_oracle);
    CHECK(cfg.tolerances.empty());

    // A discrete bath needs no cutoff window.
    const ScenarioConfig discrete = parse_config_text(R"({
        "pipeline": "oracle-check",
        "spectral_density": {"type": "discrete_sum",
                             "modes": [{"omega": 1.0, "g": [0.1, 0.0]}]},
        "environment": {"beta": 2.0}
    })",
                                                      "cfg");
    CHECK(discrete.cutoff.omega_max == 0.0);
}

TEST_CASE("coupling scale acts quadratically on densities and inversely on amplitudes") {
    SUBCASE("densities") {
        const SpectralDensity flat = FlatSpectralDensity{0.4};
        const auto scaled = scaled_density(flat, 0.5);
        CHECK(std::get<FlatSpectralDensity>(scaled).gamma0 == 0.1);

        const SpectralDensity lor = LorentzianSpectralDensity{0.8, 0.3, 1.1};
        const auto lscaled = scaled_density(lor, 0.5);
        CHECK(std::get<LorentzianSpectralDensity>(lscaled).gamma0 == 0.2);
        CHECK(std::get<LorentzianSpectralDensity>(lscaled).eta == 0.3);
        CHECK(std::get<LorentzianSpectralDensity>(lscaled).omega_c == 1.1);

        DiscreteSumSpectralDensity sum;
        sum.modes.push_back({1.0, complex(0.2, -0.1)});
        const auto dscaled = scaled_density(sum, 0.5);
        CHECK(std::get<DiscreteSumSpectralDensity>(dscaled).modes[0].g == complex(0.1, -0.05));
    }

    SUBCASE("environment") {
        EnvironmentState env;
        env.beta = 1.0;
        env.displaced.push_back({1.2, 0.1, complex(2.0, 0.0)});
        env.squeezed.push_back({0.9, complex(0.05, 0.0), complex(0.08, 0.0)});
        const auto scaled = scaled_environment(env, 0.5);
        CHECK(scaled.displaced[0].g == 0.05);
        CHECK(scaled.displaced[0].alpha == complex(4.0, 0.0));
        CHECK(scaled.squeezed[0].g == complex(0.025, 0.0));
        CHECK(scaled.squeezed[0].cc == complex(0.32, 0.0));
    }

    SUBCASE("tolerance profile resolution") {
        ScenarioConfig cfg;
        CHECK(check_tolerance(cfg, "default", "first_law", 1e-8) == 1e-8);
        CHECK(check_tolerance(cfg, "strict", "first_law", 1e-8) == 1e-9);
        cfg.tolerances["first_law"] = 3e-7;
        CHECK(check_tolerance(cfg, "default", "first_law", 1e-8) == 3e-7);
        CHECK(check_tolerance(cfg, "strict", "first_law", 1e-8) == 3e-7);
    }
}

TEST_CASE("green method constraints surface as config errors") {
    ScenarioConfig cfg;
    cfg.pipeline = "simulate";
    cfg.J = LorentzianSpectralDensity{0.5, 0.4, 1.0};
    cfg.cutoff = FrequencyCutoff{6.0, false};
    cfg.grid = TimeGrid{0.01, 100};
    cfg.has_grid = true;
    cfg.env.beta = std::numeric_limits<double>::infinity();
    cfg.noise_modes = 100;

    cfg.green_method = "closed_form";  // half-axis window contradicts the kernel
    CHECK_THROWS_AS(run_simulation(cfg, 1), ConfigError);

    cfg.J = FlatSpectralDensity{0.4};
    cfg.green_method = "volterra";  // Dirac kernel has no quadrature form
    CHECK_THROWS_AS(run_simulation(cfg, 1), ConfigError);

    cfg.green_method = "auto";
    cfg.has_grid = false;
    CHECK_THROWS_AS(run_simulation(cfg, 1), ConfigError);
}

TEST_CASE("simulate pipeline writes artifacts and a passing manifest") {
    const fs::path dir = fresh_dir("simulate_smoke");
    const ScenarioConfig cfg = parse_config_text(kSimulateSmoke, "cfg");
    CHECK(run_scenario(cfg, dir.string(), 1, "default") == 0);

    for (const char* name : {"manifest.json", "green.csv", "coefficients.csv", "state.csv",
                             "thermo.csv"})
        CHECK(fs::exists(dir / name));

    CHECK(first_line(dir / "green.csv") == "t,re_G,im_G,re_Gdot,im_Gdot");
    CHECK(first_line(dir / "coefficients.csv") ==
          "t,omega_r,gamma,I,N,N_defined,re_F,im_F,re_f,im_f,re_delta,im_delta");
    CHECK(first_line(dir / "state.csv") == "t,re_a,im_a,re_aa,im_aa,n,S");
    CHECK(first_line(dir / "thermo.csv") ==
          "t,U,W,Q,Qdot_in,Qdot_out,beta_r,beta_r_defined,S,Sigma,sigma");

    const auto m = manifest_of(dir);
    CHECK(m.at("pipeline") == "simulate");
    CHECK(m.at("checks").at("first_law").at("pass").get<bool>());
    CHECK(m.at("checks").at("gibbs_fixed_point").at("pass").get<bool>());
    CHECK(m.at("gibbs_fixed_point").at("applicable").get<bool>());
    CHECK(m.at("final").contains("U"));
    CHECK(m.at("final").contains("n"));
    CHECK(m.at("infrared_convergent").is_boolean());
    CHECK_FALSE(m.contains("error"));
}

TEST_CASE("runs are deterministic artifact for artifact") {
    const fs::path dir1 = fresh_dir("determinism_a");
    const fs::path dir2 = fresh_dir("determinism_b");
    const ScenarioConfig cfg = parse_config_text(kSimulateSmoke, "cfg");
    REQUIRE(run_scenario(cfg, dir1.string(), 1, "default") == 0);
    REQUIRE(run_scenario(cfg, dir2.string(), 1, "default") == 0);

    for (const char* name : {"state.csv", "thermo.csv", "coefficients.csv", "manifest.json"})
        CHECK(read_text(dir1 / name) == read_text(dir2 / name));
}

TEST_CASE("the coupling scale is a pure reparametrization of the density") {
    const fs::path dir1 = fresh_dir("lambda_scaled");
    const fs::path dir2 = fresh_dir("lambda_unit");

    ScenarioConfig scaled = parse_config_text(kSimulateSmoke, "cfg");
    std::get<FlatSpectralDensity>(scaled.J).gamma0 = 0.4;
    scaled.lambda = 0.5;

    ScenarioConfig direct = parse_config_text(kSimulateSmoke, "cfg");
    std::get<FlatSpectralDensity>(direct.J).gamma0 = 0.1;

    REQUIRE(run_scenario(scaled, dir1.string(), 1, "default") == 0);
    REQUIRE(run_scenario(direct, dir2.string(), 1, "default") == 0);

    const auto m1 = manifest_of(dir1);
    const auto m2 = manifest_of(dir2);
    CHECK(m1.at("final").at("n").get<double>() == m2.at("final").at("n").get<double>());
    CHECK(m1.at("final").at("U").get<double>() == m2.at("final").at("U").get<double>());
}

TEST_CASE("steady pipeline reports the excitation integral") {
    const fs::path dir = fresh_dir("steady_smoke");
    const ScenarioConfig cfg = parse_config_text(R"({
        "pipeline": "steady",
        "spectral_density": {"type": "lorentzian", "gamma0": 0.1, "eta": 0.04, "omega_c": 1.0},
        "cutoff": {"omega_max": 3.0, "full_axis": true},
        "environment": {"beta": 1.0}
    })",
                                                 "cfg");
    CHECK(run_scenario(cfg, dir.string(), 1, "default") == 0);
    const auto m = manifest_of(dir);
    CHECK(m.at("steady").at("n_bar").get<double>() > 0.0);
    CHECK(m.at("steady").at("converged").get<bool>());
    CHECK(m.at("checks").at("normalization").at("pass").get<bool>());
    CHECK(fs::exists(dir / "steady.json"));
}

TEST_CASE("ness pipeline balances the driven fluxes") {
    const fs::path dir = fresh_dir("ness_smoke");
    const ScenarioConfig cfg = parse_config_text(R"({
        "pipeline": "ness",
        "spectral_density": {"type": "lorentzian", "gamma0": 0.1, "eta": 0.5, "omega_c": 1.0},
        "cutoff": {"omega_max": 6.0, "full_axis": true},
        "environment": {"beta": 1.0,
                        "displaced": [{"omega": 1.0, "g": [0.02, 0.0],
                                       "alpha": [30.0, 0.0]}]},
        "ness": {"sweep_lo": 0.9, "sweep_hi": 1.1, "sweep_points": 11}
    })",
                                                 "cfg");
    CHECK(run_scenario(cfg, dir.string(), 1, "default") == 0);

    const auto m = manifest_of(dir);
    CHECK(m.at("checks").at("flux_balance").at("pass").get<bool>());
    CHECK(m.at("checks").at("sigma_vs_heat").at("pass").get<bool>());
    CHECK(m.at("checks").at("sigma_nonnegative").at("pass").get<bool>());
    CHECK(m.at("checks").at("resonance_peak").at("pass").get<bool>());
    CHECK(m.at("resonance").at("condition_root").get<double>() ==
          doctest::Approx(1.0).epsilon(1e-9));

    const auto report = nlohmann::json::parse(read_text(dir / "ness.json"));
    CHECK(report.at("Wdot").get<double>() > 0.0);
    CHECK(report.at("Qdot").get<double>() < 0.0);
    CHECK(report.at("sigmadot").get<double>() >= 0.0);
    CHECK(report.at("resonance_sweep").size() == 11);
}

TEST_CASE("oracle-check pipeline validates against the finite-bath reference") {
    const fs::path dir = fresh_dir("oracle_smoke");
    const ScenarioConfig cfg = parse_config_text(R"({
        "pipeline": "oracle-check",
        "spectral_density": {"type": "discrete_sum", "modes": [
            {"omega": 0.8,  "g": [0.12, 0.0]},
            {"omega": 1.1,  "g": [0.1, 0.05]},
            {"omega": 1.45, "g": [0.08, 0.0]}]},
        "grid": {"dt": 0.004, "steps": 750},
        "environment": {"beta": 1.0},
        "initial_state": {"type": "coherent", "alpha": [0.8, -0.3]},
        "oracle": {"stride": 25},
        "noise_modes": 0
    })",
                                                 "cfg");
    CHECK(run_scenario(cfg, dir.string(), 1, "default") == 0);

    const auto m = manifest_of(dir);
    CHECK(m.at("bath_modes").get<int>() == 3);
    CHECK(m.at("checks").at("green_vs_oracle").at("pass").get<bool>());
    CHECK(m.at("checks").at("moments_vs_oracle").at("pass").get<bool>());
    CHECK(fs::exists(dir / "oracle.csv"));
}

TEST_CASE("sweep records per-point failures without aborting") {
    const fs::path dir = fresh_dir("sweep_mixed");
    const ScenarioConfig cfg = parse_config_text(R"({
        "pipeline": "sweep",
        "spectral_density": {"type": "lorentzian", "gamma0": 0.5, "eta": 0.1, "omega_c": 1.0},
        "cutoff": {"omega_max": 6.0, "full_axis": true},
        "grid": {"dt": 0.02, "steps": 500},
        "environment": {"beta": 1.0},
        "initial_state": {"type": "thermal", "n": 0.3},
        "noise_modes": 600,
        "sweep": {"parameter": "eta", "values": [0.1, -0.1], "pipeline": "rcmap"}
    })",
                                                 "cfg");
    CHECK(run_scenario(cfg, dir.string(), 1, "default") == 0);

    const auto m = manifest_of(dir);
    REQUIRE(m.at("points").size() == 2);
    const auto& ok = m.at("points")[0];
    const auto& bad = m.at("points")[1];
    CHECK(ok.contains("pass"));
    CHECK(ok.contains("deviation"));
    CHECK_FALSE(ok.contains("error"));
    CHECK(fs::exists(dir / "point_000" / "manifest.json"));
    CHECK(bad.contains("error"));
    CHECK_FALSE(fs::exists(dir / "point_001" / "manifest.json"));
    CHECK(fs::exists(dir / "sweep.json"));
}

TEST_CASE("pipeline failures map to documented exit codes") {
    SUBCASE("config-level: steady needs a continuum") {
        const fs::path dir = fresh_dir("exit_config");
        ScenarioConfig cfg = parse_config_text(R"({
            "pipeline": "steady",
            "spectral_density": {"type": "discrete_sum",
                                 "modes": [{"omega": 1.0, "g": [0.1, 0.0]}]},
            "environment": {"beta": 1.0}
        })",
                                               "cfg");
        CHECK(run_scenario(cfg, dir.string(), 1, "default") == 2);
        CHECK(manifest_of(dir).contains("error"));
    }

    SUBCASE("physics-level: half-axis thermal tail refuses to converge") {
        const fs::path dir = fresh_dir("exit_runtime");
        ScenarioConfig cfg = parse_config_text(R"({
            "pipeline": "steady",
            "spectral_density": {"type": "lorentzian", "gamma0": 0.1, "eta": 0.04,
                                 "omega_c": 1.0},
            "cutoff": {"omega_max": 3.0},
            "environment": {"beta": 1.0}
        })",
                                               "cfg");
        CHECK(run_scenario(cfg, dir.string(), 1, "default") == 3);
        const auto m = manifest_of(dir);
        CHECK(m.contains("error"));
    }

    SUBCASE("missing file") {
        std::string message;
        CHECK(run_scenario_file("/nonexistent/nowhere.json", fresh_dir("exit_missing").string(),
                                1, "default", &message) == 2);
        CHECK(message.find("cannot open") != std::string::npos);
    }

    SUBCASE("bad tolerance profile") {
        ScenarioConfig cfg = parse_config_text(kSimulateSmoke, "cfg");
        CHECK_THROWS_AS(run_scenario(cfg, fresh_dir("exit_profile").string(), 1, "lenient"),
                        ConfigError);
    }
}
