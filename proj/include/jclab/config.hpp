#pragma once

// Scenario configuration: INI sections [space], [profiles], [aux], [run],
// [oracle], [output], [algebra], [berry], [coherent]. Every key is optional;
// an empty file gives the constant resonant scenario. Lists are
// comma-separated, profiles are written "<kind> c0, c1, ...".

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "jclab/aux_solver.hpp"
#include "jclab/fock_space.hpp"
#include "jclab/oracle.hpp"
#include "jclab/params.hpp"

namespace jclab {

struct AuxConfig {
    double theta0 = 1.2;
    double phi0 = 0.2;
    bool adiabatic_matched = false;
    AuxOptions options;
};

struct RunConfig {
    double t_final = 20.0;
    std::size_t samples = 201;
    std::vector<int> sigmas{1, -1};
    double max_infidelity = 1e-6;
};

struct OracleConfig {
    bool enabled = true;
    OracleOptions options;
};

struct OutputConfig {
    std::optional<std::filesystem::path> directory;
    int precision = 12;
};

struct AlgebraConfig {
    double tol = 1e-12;
    double block_tol = 1e-13;
};

struct BerryConfig {
    std::vector<double> theta_degrees{0.0, 30.0, 60.0, 90.0, 120.0};
    std::vector<int> sigmas{1, -1};
    std::size_t m = 0;
    double g_abs = 0.05;
    double phi0 = 0.0;
    std::optional<double> period;  ///< overrides the one-cycle period
    double max_error = 1e-3;
};

struct CoherentConfig {
    double xi = 1.0;
    int sigma = 1;
    double tail_tol = 1e-10;
    double max_diff = 1e-6;
};

struct ScenarioConfig {
    FockSpaceSpec space = FockSpaceSpec{32, 3, 3};
    std::vector<std::size_t> m_list{0, 1, 2};
    ModelParams params;
    AuxConfig aux;
    RunConfig run;
    OracleConfig oracle;
    OutputConfig output;
    AlgebraConfig algebra;
    BerryConfig berry;
    CoherentConfig coherent;
};

/// Parses INI text. Throws ConfigError naming the offending "section.key".
ScenarioConfig parse_config(const std::string& text);

/// Reads and parses a file; ConfigError if it cannot be read.
ScenarioConfig load_config(const std::filesystem::path& path);

/// "<kind> c0, c1, ..." -> TimeProfile. Throws ConfigError.
TimeProfile parse_profile(const std::string& text);

}  // namespace jclab
