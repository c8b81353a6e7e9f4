#pragma once
/// \file
/// \brief Finite-volume diffusive hydrodynamics: ∂q/∂t = −∇·j, j = L(θ)∇θ,
/// with reservoir, no-flux or periodic ends, entropy bookkeeping, steady
/// states and the x → λx, t → λ²t scaling check.

#include "lte/kernels.hpp"
#include "lte/models.hpp"

#include <functional>
#include <string>
#include <vector>

namespace lte {

/// Local thermodynamics seen by the solver.
struct HydroModel {
    std::string name;
    int dim = 1;
    /// θ = s'(q); `guess` may be empty. Throws StepRejected outside the domain.
    std::function<Vec(const Vec& q, const Vec& guess)> theta_of;
    /// q = −π'(θ).
    std::function<Vec(const Vec& theta)> q_of;
    std::function<Mat(const Vec& q, const Vec& theta)> s_hessian;
    std::function<double(const Vec& q, const Vec& theta)> entropy;
    /// Covariance π''(θ) of the equilibrium fluctuations.
    std::function<Mat(const Vec& theta)> susceptibility;
};

/// Unsupported for models without a macroscopic entropy (spin chain).
HydroModel hydro_model(const Model& m);

using Onsager = kernels::OnsagerFn;

Onsager constant_onsager(int dim, double mobility);
/// L(θ) = mobility·θ₁·I.
Onsager linear_onsager(int dim, double mobility);

struct Boundary {
    enum class Kind { NoFlux, Reservoir, Periodic };
    Kind kind = Kind::NoFlux;
    Vec theta; ///< reservoir control (Reservoir only)

    static Boundary no_flux() { return {}; }
    static Boundary reservoir(Vec theta) { return {Kind::Reservoir, std::move(theta)}; }
    static Boundary periodic() { return {Kind::Periodic, {}}; }
};

std::string_view to_string(Boundary::Kind k) noexcept;

struct HydroScenario {
    HydroModel model;
    Onsager onsager;
    int cells = 64;
    double length = 1.0; ///< Ω = [0, length]
    Boundary left;
    Boundary right;
    std::function<Vec(double x)> initial_q;
    double scaling_exponent = 2.0;
    double t_end = 0.1;
    std::vector<double> checkpoints; ///< output times; t_end is always included
    double cfl = 0.4;
    /// Orientation of j relative to L∇θ; +1 is the physical choice.
    double flux_sign = 1.0;
    bool record_every_step = false;

    double spacing() const { return length / cells; }
    double center(int i) const { return (i + 0.5) * spacing(); }
    void validate() const;
};

struct HydroState {
    double t = 0.0;
    Mat q;     ///< n × M
    Mat theta; ///< n × M

    int cells() const { return static_cast<int>(q.cols()); }
};

/// θ recomputed from q; `warm` supplies Newton starting points.
HydroState make_state(const HydroScenario& sc, Mat q, double t, const Mat* warm = nullptr);
HydroState initial_state(const HydroScenario& sc);

/// n × (M+1) face fluxes; column 0 is the left end, column M the right end.
Mat face_fluxes(const HydroState& st, const HydroScenario& sc, Exec exec = Exec::Parallel);

/// 0.4·h²/max ρ(L(θᵢ)|s''(qᵢ)|) (with the scenario's CFL factor).
double stable_time_step(const HydroState& st, const HydroScenario& sc);

/// Explicit Euler update. Throws Input when dt exceeds the stable step and
/// StepRejected when a cell leaves the entropy domain.
HydroState step(const HydroState& st, const HydroScenario& sc, double dt, Exec exec = Exec::Parallel);

struct Trajectory {
    std::vector<HydroState> states;
    int steps = 0;
    int rejections = 0;
};

/// Adaptive explicit integration to t_end; halves dt on domain exits.
Trajectory solve(const HydroScenario& sc, Exec exec = Exec::Parallel);

/// State interpolated to x (piecewise constant per cell).
Vec theta_at(const HydroState& st, const HydroScenario& sc, double x);
/// Nearest stored state to time t.
const HydroState& state_at(const Trajectory& tr, double t);

struct EntropyBalance {
    double t = 0.0;
    double total_entropy = 0.0;   ///< Σ h s(qᵢ)
    double rate = 0.0;            ///< Σ h θᵢ·dqᵢ/dt
    double production = 0.0;      ///< Σ_faces Δθ·j
    double min_face_production = 0.0;
    double boundary_flux = 0.0;   ///< θ_b·j_b − θ_a·j_a
    double balance_residual = 0.0;
};

struct EntropyDiagnostics {
    std::vector<EntropyBalance> points;
    bool nondecreasing = true;     ///< meaningful for closed systems
    double worst_decrease = 0.0;
    double min_face_production = 0.0;
    double max_balance_residual = 0.0;
};

EntropyBalance entropy_balance(const HydroState& st, const HydroScenario& sc);
EntropyDiagnostics entropy_diagnostics(const Trajectory& tr, const HydroScenario& sc, double tolerance = 1e-12);

/// −(j_{i+1/2} − j_{i−1/2})/h evaluated at a θ field.
Mat divergence_residual(const Mat& theta, const HydroScenario& sc);

struct SteadyState {
    HydroState state;
    std::string method; ///< "newton" or "relaxation"
    int iterations = 0;
    double residual = 0.0;
};

/// Solves ∇·(L(θ)∇θ) = 0 with reservoir ends to residual < 1e-10.
SteadyState steady_state(const HydroScenario& sc);

struct ScaleReport {
    double lambda = 1.0;
    double t_star = 0.0;
    int cells = 0;
    double max_deviation = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

/// Base run on M cells to t★ against the run stretched by integer λ
/// (λM cells on λΩ, initial q(x/λ)) to λ²t★, block-averaged back.
ScaleReport scale_invariance_check(const HydroScenario& sc, int lambda, double t_star, Exec exec = Exec::Parallel);

} // namespace lte
