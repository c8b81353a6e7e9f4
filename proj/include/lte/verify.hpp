#pragma once
/// \file
/// \brief Invariant suites for every module, run with fixed seeds.

#include "lte/report.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace lte {

struct VerifyOptions {
    /// Orientation handed to every hydro scenario. −1 is the mutation fixture.
    double flux_sign = 1.0;
    std::uint64_t seed = 20240611;
    Exec exec = Exec::Parallel;
};

struct SuiteEntry {
    std::string name;     ///< "<module>.<invariant>"
    std::string relation; ///< what is being asserted, in words
    std::function<CheckRecord()> run;
};

std::vector<SuiteEntry> verification_suite(const VerifyOptions& opt = {});

/// Runs entries whose name contains `filter`; writes the coverage table to `coverage` if given.
Report run_verify(const std::string& filter, std::ostream* coverage = nullptr, const VerifyOptions& opt = {});

} // namespace lte
