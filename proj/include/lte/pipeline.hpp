#pragma once
/// \file
/// \brief Hydro solve → control field → per-point meso/micro/probe checks.

#include "lte/report.hpp"

#include <string>

namespace lte {

struct Stages {
    bool macro = true;
    bool meso = true;
    bool micro = true;
    bool zeroth = true;
    /// Volume convergence, random KMS instances, completeness, GTS.
    bool quantum_globals = false;
};

/// Runs the selected stages. Checks whose name does not contain `filter`
/// are skipped. Failures are recorded and the run continues.
Report run_pipeline(const ScenarioConfig& cfg, const Stages& stages, const std::string& filter = "",
    const std::string& command = "pipeline", Exec exec = Exec::Parallel);

/// Tabulates s, π, π'' on a θ grid and checks the Legendre pair relations.
Report run_thermo(const ScenarioConfig& cfg, const std::string& filter = "");

} // namespace lte
