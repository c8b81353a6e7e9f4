#pragma once
/// \file
/// \brief Gaussian fluctuation fields with cell-local covariance π''(θ(x))/h,
/// smeared fields, characteristic functions and the punctual limit.

#include "lte/hydro.hpp"

#include <complex>
#include <vector>

namespace lte {

/// Spatial dimension of the fluctuation fields; enters ε^{−d/2}.
inline constexpr int kFieldDim = 1;

struct CellGrid {
    int cells = 0;
    double length = 1.0;

    double spacing() const { return length / cells; }
    double center(int i) const { return (i + 0.5) * spacing(); }
};

/// Snapshot of a control field θ(x) on a grid.
struct ControlField {
    CellGrid grid;
    Mat theta; ///< n × M
};

ControlField control_field(const HydroState& st, const HydroScenario& sc);
ControlField uniform_field(const CellGrid& g, const Vec& theta);

/// Per-cell π''(θᵢ) and its Cholesky factor.
class CovarianceField {
public:
    /// Throws PhaseBoundary naming the first cell where π'' is not positive definite.
    CovarianceField(const ControlField& field, const std::function<Mat(const Vec&)>& susceptibility);

    const CellGrid& grid() const { return grid_; }
    int dim() const { return dim_; }
    const Mat& covariance(int cell) const { return cov_[static_cast<std::size_t>(cell)]; }
    const Mat& factor(int cell) const { return chol_[static_cast<std::size_t>(cell)]; }
    const Mat& theta() const { return theta_; }
    Mat susceptibility(const Vec& theta) const { return chi_(theta); }

private:
    CellGrid grid_;
    int dim_ = 0;
    Mat theta_;
    std::function<Mat(const Vec&)> chi_;
    std::vector<Mat> cov_;
    std::vector<Mat> chol_;
};

struct FluctuationSample {
    std::uint64_t index = 0;
    Mat xi; ///< n × M
};

/// ξᵢ = Cᵢ zᵢ/√h with zᵢ keyed by (seed, cell, sample, component).
FluctuationSample sample_field(const CovarianceField& cov, const CounterRng& rng, std::uint64_t sample);

/// f(x) = w·(1 − u²)², u = (x − c)/r, zero for |u| ≥ 1.
struct TestFunction {
    double center = 0.0;
    double radius = 1.0;
    Vec weights = Vec::Ones(1);

    Vec operator()(double x) const;
    double support_lo() const { return center - radius; }
    double support_hi() const { return center + radius; }
    /// ∫|f|² = r·|w|²·256/315.
    double norm_squared() const;
};

/// ε^{−d/2} f(c + (x − x₀)/ε).
struct ScaledTestFunction {
    TestFunction base;
    double x0 = 0.5;
    double eps = 1.0;

    Vec operator()(double x) const;
    double support_lo() const { return x0 - eps * base.radius; }
    double support_hi() const { return x0 + eps * base.radius; }
};

/// Grid weights h·f(xᵢ) on the support cells.
struct Smearing {
    std::vector<int> cells;
    Mat weights; ///< n × |cells|
    double spacing = 0.0;
    double norm_squared() const; ///< Σ h|f(xᵢ)|² (grid quadrature)
};

/// Throws Input when the support leaves the grid.
Smearing discretize(const TestFunction& f, const CellGrid& g);
Smearing discretize(const ScaledTestFunction& f, const CellGrid& g);

/// ξ(f) = Σᵢ h f(xᵢ)·ξᵢ.
double smear(const FluctuationSample& s, const Smearing& f);

/// N smeared draws without materialising the field; agrees with
/// smear(sample_field(...)) to round-off.
std::vector<double> smeared_draws(const CovarianceField& cov, const Smearing& f, const CounterRng& rng,
    std::size_t count, Exec exec = Exec::Parallel);

/// Σᵢ h f(xᵢ)·π''(θᵢ) f(xᵢ): the exact variance of ξ(f) on the grid.
double smeared_variance(const CovarianceField& cov, const Smearing& f);

/// Empirical mean of exp(iξ(f)).
std::complex<double> characteristic_estimate(std::span<const double> draws);
double gaussian_prediction(double variance);

struct PunctualEntry {
    double eps = 0.0;
    double target = 0.0;         ///< ‖f‖²·w·π''(θ(x))w
    double exact_variance = 0.0; ///< grid variance of ξ(f_{x,ε})
    double bias = 0.0;           ///< exact_variance − target
    double sample_variance = 0.0;
    double standard_error = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    bool sampling_consistent = false; ///< |sample − exact| ≤ 3 SE
};

struct PunctualReport {
    double x = 0.0;
    std::size_t samples = 0;
    double gradient = 0.0;   ///< |∇θ| at x
    std::vector<PunctualEntry> entries;
    double bias_slope = 0.0; ///< log-log slope of |bias| vs ε; NaN when bias vanishes
    double allowance = 0.0;  ///< 5(ε|∇θ|)²·target at the smallest ε
    bool final_within = false;
    bool passed = false;
};

/// Precondition: ε ≥ 10h for every ε and the scaled support inside Ω.
PunctualReport punctual_covariance_check(const CovarianceField& cov, const TestFunction& f, double x,
    const std::vector<double>& eps_list, std::size_t samples, const CounterRng& rng, Exec exec = Exec::Parallel);

struct ScalingEntry {
    double eps = 0.0;
    double norm_squared = 0.0;
    std::complex<double> estimate;
    double prediction = 0.0;
};

struct ScalingReport {
    std::size_t samples = 0;
    std::vector<ScalingEntry> entries;
    double max_norm_spread = 0.0;
    double max_pairwise = 0.0;
    bool passed = false;
};

/// Uniform field only: characteristic values of f_{x₀,ε} must not depend on ε.
ScalingReport scaling_invariance_check(const CovarianceField& cov, const TestFunction& f, double x0,
    const std::vector<double>& eps_list, std::size_t samples, const CounterRng& rng, Exec exec = Exec::Parallel);

} // namespace lte
