#pragma once
/// \file
/// \brief Shared vocabulary types: state densities, control variables, error kinds.

#include <Eigen/Dense>

#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lte {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// Stand-in for the θ₁ → 0⁺ (infinite temperature) limit in microscopic checks.
inline constexpr double kZeroPlus = 1e-12;

enum class ErrorKind {
    Input,
    Domain,
    NonDifferentiable,
    GradientDivergence,
    ModelInconsistency,
    Singular,
    Capacity,
    InsufficientData,
    PhaseBoundary,
    StepRejected,
    Convergence,
    Unsupported,
    Integrator,
    Config,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind)
    {
    }
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Thermodynamic state q = (e, q₂, ..., qₙ); q₁ is the energy density.
struct StateDensity {
    Vec q;

    StateDensity() = default;
    explicit StateDensity(Vec v) : q(std::move(v)) {}
    StateDensity(std::initializer_list<double> v) : q(Vec::Map(v.begin(), static_cast<Eigen::Index>(v.size()))) {}

    int dim() const { return static_cast<int>(q.size()); }
    double energy() const { return q[0]; }
    double operator[](int i) const { return q[i]; }
};

/// Control variable θ = s'(q); θ₁ = 1/T and θⱼ = fⱼ/T.
struct ControlVariable {
    Vec theta;

    ControlVariable() = default;
    explicit ControlVariable(Vec v) : theta(std::move(v)) {}
    ControlVariable(std::initializer_list<double> v)
        : theta(Vec::Map(v.begin(), static_cast<Eigen::Index>(v.size())))
    {
    }

    int dim() const { return static_cast<int>(theta.size()); }
    double beta() const { return theta[0]; }
    double operator[](int i) const { return theta[i]; }

    double temperature() const
    {
        if (!(theta[0] > 0.0))
            throw Error(ErrorKind::Domain, "temperature requested for theta_1 <= 0");
        return 1.0 / theta[0];
    }
    /// fⱼ = θⱼ/θ₁ for j ≥ 1 (zero-based index).
    double conjugate_force(int j) const { return theta[j] / theta[0]; }
};

} // namespace lte
