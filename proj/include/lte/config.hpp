#pragma once
/// \file
/// \brief Scenario configuration: TOML in, validated structs out.

#include "lte/hydro.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lte {

struct ModelConfig {
    std::string kind = "paramagnet";
    double splitting = 1.0;
    double half_width = 3.0;
    double hopping = 1.0;
    int sites = 8;
    double exchange = 1.0;
    double anisotropy = 0.0;
    double field = 0.0;
};

struct BoundaryConfig {
    std::string kind = "no_flux";
    std::vector<double> theta;
};

/// Initial data given in controls: uniform, linear, step or sine.
struct InitialConfig {
    std::string kind = "uniform";
    std::vector<double> theta;
    std::vector<double> theta_left;
    std::vector<double> theta_right;
    std::vector<double> amplitude;
    double position = 0.5;
    int mode = 1;
};

struct HydroConfig {
    int cells = 64;
    double length = 1.0;
    double t_end = 0.05;
    std::vector<double> checkpoints;
    double cfl = 0.4;
    std::string onsager = "constant";
    double mobility = 1.0;
    double scaling_exponent = 2.0;
    BoundaryConfig left;
    BoundaryConfig right;
    InitialConfig initial;
};

struct LtePoint {
    double x = 0.5;
    double t = 0.0;
};

struct FluctuationConfig {
    std::size_t samples = 20000;
    std::vector<double> eps{0.2, 0.1};
    int cells = 1000; ///< 0: use the hydro grid
};

struct QuantumConfig {
    std::vector<int> convergence_sites{8, 16, 32, 64, 128, 256, 512, 1024};
    int restriction_sites = 400;
    int window = 11;
    double restriction_tolerance = 1e-2;
    int covariance_sites = 256;
    double covariance_tolerance = 1e-6;
    int kms_sites = 4;
    std::vector<double> kms_taus{0.0, 0.7, 1.9};
    double kms_tolerance = 1e-10;
};

struct ProbeConfig {
    double omega0 = 1.0;
    double gamma0 = 1.0;
    double tau_max = 30.0;
    double tolerance = 1e-6;
    std::string initial = "excited";
};

struct ThermoConfig {
    double theta_min = 0.1;
    double theta_max = 3.0;
    double theta2 = 0.0;
    int points = 25;
};

struct ScenarioConfig {
    std::string source;
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    ModelConfig model;
    HydroConfig hydro;
    std::vector<LtePoint> points;
    FluctuationConfig fluctuations;
    QuantumConfig quantum;
    ProbeConfig probe;
    ThermoConfig thermo;

    /// Effective configuration with every default filled in.
    nlohmann::ordered_json echo() const;
    /// FNV-1a over the canonical echo.
    std::string hash() const;
};

/// Throws Error(Config) with the offending key path.
ScenarioConfig parse_config(const std::string& text, const std::string& source,
    std::optional<std::uint64_t> seed_override = std::nullopt);
ScenarioConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override = std::nullopt);

Model make_model(const ModelConfig& m);
HydroScenario make_scenario(const ScenarioConfig& c);

std::uint64_t fnv1a(std::string_view bytes);
std::size_t edit_distance(std::string_view a, std::string_view b);

} // namespace lte
