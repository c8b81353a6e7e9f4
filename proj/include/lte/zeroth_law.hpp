#pragma once
/// \file
/// \brief Finite probe thermalised by a detailed-balance (Davies) master
/// equation at the local inverse temperature of a hydrodynamic state.

#include "lte/hydro.hpp"

#include <functional>
#include <string>
#include <vector>

namespace lte {

struct ProbeSystem {
    CMat hamiltonian;         ///< Hermitian, dim ≤ 8, nondegenerate
    std::vector<CMat> coupling; ///< Hermitian A_k

    int dim() const { return static_cast<int>(hamiltonian.rows()); }
    /// Throws Input for malformed operators, Unsupported for degenerate spectra.
    void validate() const;
};

/// H = diag(0, ω₀), A = σₓ.
ProbeSystem qubit_probe(double omega0);
/// Random Hermitian H (nondegenerate) and one random Hermitian coupling.
ProbeSystem random_probe(int dim, std::uint64_t seed);

/// γ(ω ≥ 0); negative frequencies follow from γ(−ω) = e^{−βω}γ(ω).
using RateProfile = std::function<double(double)>;
RateProfile flat_rate(double gamma0);

struct JumpOperator {
    int coupling = 0;
    double omega = 0.0;
    double rate = 0.0;
    CMat op; ///< A_k(ω) = Σ_{E_b−E_a=ω} P_a A_k P_b
};

struct ThermalGenerator {
    double beta = 0.0;
    CMat hamiltonian;
    Vec energies;
    CMat eigenvectors;
    std::vector<JumpOperator> jumps;
    CMat liouvillian; ///< column-major vectorisation, vec(AρB) = (Bᵀ⊗A)vec ρ

    int dim() const { return static_cast<int>(hamiltonian.rows()); }
    CMat apply(const CMat& rho) const;
    CMat gibbs() const;
};

ThermalGenerator build_davies_generator(const ProbeSystem& probe, double beta, const RateProfile& rates = flat_rate(1.0));

/// Largest |γ(−ω) − e^{−βω}γ(ω)| over the jump set.
double detailed_balance_residual(const ThermalGenerator& g);

/// ρ(τ) = exp(τ𝓛)ρ₀. Throws Integrator when trace, Hermiticity or positivity fail.
CMat evolve(const ThermalGenerator& g, const CMat& rho0, double tau);

/// Kernel of 𝓛 normalised to unit trace.
CMat stationary_state(const ThermalGenerator& g);

double trace_distance(const CMat& a, const CMat& b);

/// Populations in the energy eigenbasis, ascending energy.
Vec populations(const ThermalGenerator& g, const CMat& rho);

/// Least-squares β from ln pⱼ = −βEⱼ + c.
double fit_beta(const Vec& energies, const Vec& populations);

struct ThermalizationReport {
    double beta = 0.0;
    std::vector<double> taus;
    std::vector<double> distances;
    double final_distance = 0.0;
    bool contractive = true;
    double decay_rate = 0.0;   ///< fitted from ln D(τ)
    double spectral_gap = 0.0; ///< smallest |Re λ| over nonzero Liouvillian eigenvalues
    Vec final_populations;
    double fitted_beta = 0.0;
    bool passed = false;
};

ThermalizationReport thermalization_check(const ThermalGenerator& g, const CMat& rho0, double tau_max,
    int points = 200, double tolerance = 1e-6);

struct ProbeReport {
    double x = 0.0;
    double t = 0.0;
    double beta = 0.0;
    double temperature = 0.0;
    std::string hydro_model;
    std::string probe_label;
    ThermalizationReport thermalization;
    Vec stationary_populations;
};

/// θ₁(x, t) by linear interpolation in x between cell centres and in t
/// between stored states. Throws Input outside the trajectory's coverage.
Vec interpolate_theta(const Trajectory& tr, const HydroScenario& sc, double x, double t);
Vec interpolate_theta(const HydroState& st, const HydroScenario& sc, double x);

ProbeReport local_probe_scenario(const Trajectory& tr, const HydroScenario& sc, double x, double t,
    const ProbeSystem& probe, const CMat& rho0, double tau_max, const RateProfile& rates = flat_rate(1.0));

/// Same, for a single snapshot (e.g. a steady state).
ProbeReport local_probe_scenario(const HydroState& st, const HydroScenario& sc, double x,
    const ProbeSystem& probe, const CMat& rho0, double tau_max, const RateProfile& rates = flat_rate(1.0));

} // namespace lte
