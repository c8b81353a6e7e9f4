#pragma once
/// \file
/// \brief Convex thermodynamic formalism: entropy densities, their Legendre
/// conjugates (reduced pressures), tangent sets and the Hessian duality.
///
/// Units: k = 1. All types are immutable after construction and every
/// operation is a pure function.

#include "lte/core.hpp"
#include "lte/numerics.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace lte {

/// Axis-aligned box; bounds may be ±infinity.
struct Box {
    Vec lo;
    Vec hi;

    static Box interval(double lo, double hi);
    static Box unbounded(int n);

    int dim() const { return static_cast<int>(lo.size()); }
    bool empty() const;
    bool contains(const Vec& x) const;
    /// True when x is within `tol` (relative to 1+|bound|) of a finite face.
    bool on_boundary(const Vec& x, double tol = 1e-12) const;
};

enum class Representation { ClosedForm, Tabulated, NumericConjugate };

std::string_view to_string(Representation r) noexcept;

/// Tabulated 1-D function on a strictly increasing grid, linearly interpolated.
struct Tabulated1D {
    std::vector<double> x;
    std::vector<double> y;

    std::size_t size() const { return x.size(); }
    double operator()(double at) const;
    /// Slope of the segment containing `at` (right segment at nodes).
    double slope(double at) const;
    void validate(std::size_t min_points = 2) const;

    static Tabulated1D sample(const std::function<double(double)>& f, double lo, double hi, std::size_t points);
};

/// Concave entropy density s(q) with gradient and Hessian contracts.
/// Missing derivatives fall back to central finite differences.
class EntropyFunction {
public:
    EntropyFunction(int dim, Box domain, Box control_domain, ScalarField value, VectorField gradient = {},
        std::function<Mat(const Vec&)> hessian = {}, Representation rep = Representation::ClosedForm);

    int dim() const { return dim_; }
    const Box& domain() const { return domain_; }
    /// Θ: controls for which the supremum defining π is attained in the domain.
    const Box& control_domain() const { return control_domain_; }
    Representation representation() const { return rep_; }

    double value(const StateDensity& q) const { return value_(q.q); }
    Vec gradient(const StateDensity& q) const;
    Mat hessian(const StateDensity& q) const;

    const ScalarField& value_fn() const { return value_; }

private:
    int dim_;
    Box domain_;
    Box control_domain_;
    ScalarField value_;
    VectorField gradient_;
    std::function<Mat(const Vec&)> hessian_;
    Representation rep_;
};

/// Convex reduced pressure π(θ) = p/T.
class ReducedPressure {
public:
    ReducedPressure(int dim, Box control_domain, ScalarField value, VectorField gradient = {},
        std::function<Mat(const Vec&)> hessian = {}, Representation rep = Representation::ClosedForm);

    int dim() const { return dim_; }
    const Box& control_domain() const { return control_domain_; }
    Representation representation() const { return rep_; }

    double value(const ControlVariable& t) const { return value_(t.theta); }
    Vec gradient(const ControlVariable& t) const;
    Mat hessian(const ControlVariable& t) const;
    bool has_analytic_gradient() const { return static_cast<bool>(gradient_); }

    const ScalarField& value_fn() const { return value_; }

private:
    int dim_;
    Box control_domain_;
    ScalarField value_;
    VectorField gradient_;
    std::function<Mat(const Vec&)> hessian_;
    Representation rep_;
};

struct LegendreResult {
    double pi = 0.0;
    StateDensity q_star;
};

/// π(θ) = sup_q (s(q) − θ·q). One dimension: grid scan + golden section;
/// higher dimension: damped Newton ascent on the concave objective.
LegendreResult legendre_transform(const EntropyFunction& s, const ControlVariable& theta);

/// Reduced pressure obtained by numerically conjugating `s`.
ReducedPressure numeric_conjugate(const EntropyFunction& s);

/// One-sided slopes of a 1-D function at x, each extrapolated over the two
/// nearest intervals of spacing `step`.
struct OneSidedSlopes {
    double left = 0.0;
    double right = 0.0;
};
OneSidedSlopes one_sided_slopes(const std::function<double(double)>& f, double x, double step);
bool is_kink(const OneSidedSlopes& s);

/// q = −π'(θ). Throws NonDifferentiable at a kink of a one-dimensional π.
StateDensity q_of_theta(const ReducedPressure& pi, const ControlVariable& theta);

enum class BetaPolicy { AllowNonPositive, RequirePositive };

/// θ = s'(q). Throws GradientDivergence on the domain boundary and
/// ModelInconsistency for θ₁ ≤ 0 when `RequirePositive`.
ControlVariable theta_of_q(const EntropyFunction& s, const StateDensity& q,
    BetaPolicy policy = BetaPolicy::AllowNonPositive);

/// π''(θ) restricted to pure phases: rejects kinks (1-D) and non-finite entries.
Mat pure_phase_hessian(const ReducedPressure& pi, const ControlVariable& theta);

/// max-norm of π''(θ)·s''(q(θ)) + I.
double hessian_pair_check(const EntropyFunction& s, const ReducedPressure& pi, const ControlVariable& theta);

struct TangentSet {
    double theta = 0.0;
    double r_min = 0.0;
    double r_max = 0.0;
    bool degenerate = true;

    /// Extremal slopes {r_min, r_max} (one entry when degenerate).
    std::vector<double> extremal_slopes() const;
    /// Pure-phase equilibrium densities −ℰ(𝒯_θ), ascending.
    std::vector<double> pure_phase_densities() const;
    bool contains(double r, double tol) const { return r >= r_min - tol && r <= r_max + tol; }
    /// Verifies π(θ') − π(θ) ≥ r(θ' − θ) for r ∈ {r_min, r_max} on the grid.
    bool supports(const Tabulated1D& pi, double tol) const;
};

/// Subdifferential of a tabulated 1-D π at grid node θ.
TangentSet tangent_set(const Tabulated1D& pi, double theta);

/// Least concave majorant of tabulated data, on the same grid.
Tabulated1D concave_envelope_table(const Tabulated1D& raw);

/// Least concave majorant as a piecewise-linear EntropyFunction.
EntropyFunction concave_envelope(const Tabulated1D& raw);

/// Discrete Legendre conjugate π(θ_k) = max_i (s_i − θ_k q_i).
Tabulated1D discrete_conjugate(const Tabulated1D& s, const std::vector<double>& theta_grid);

/// Inverse discrete conjugate s**(q_i) = min_k (π_k + θ_k q_i).
Tabulated1D discrete_biconjugate(const Tabulated1D& pi, const std::vector<double>& q_grid);

/// p = π·T.
double pressure_from_pi(double pi_value, double temperature);

} // namespace lte
