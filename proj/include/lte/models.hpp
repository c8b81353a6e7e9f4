#pragma once
/// \file
/// \brief Catalog of exactly solvable reference models.
///
/// Each model exposes its entropy density and reduced pressure (closed form
/// where available) and, where it has one, a finite-volume microscopic
/// realization consumed by the quantum statistics layer.

#include "lte/thermo_core.hpp"

#include <string>
#include <variant>
#include <vector>

namespace lte {

/// Independent two-level sites with levels ±ε; q = (e).
struct Paramagnet {
    double splitting = 1.0;

    EntropyFunction entropy() const;
    ReducedPressure pressure() const;
};

/// s(q) = −q²/2 on [−w, w]; the linear-response test bed.
struct QuadraticModel {
    double half_width = 3.0;

    EntropyFunction entropy() const;
    ReducedPressure pressure() const;
};

/// Spinless fermions hopping on a ring, ε(p) = −2J cos p; q = (e, n).
struct FreeFermionChain {
    double hopping = 1.0;

    double dispersion(double p) const;
    /// Reduced pressure by quadrature; θ₁ may be any real, θ₂ any real.
    ReducedPressure pressure() const;
    /// s(q) = inf_θ (π(θ) + θ·q) by Newton iteration; s' = θ*(q), s'' by finite differences.
    EntropyFunction entropy() const;

    double pi_infinity(const ControlVariable& theta) const;
    StateDensity density(const ControlVariable& theta) const;
    /// π''(θ) = (1/2π)∫ x xᵀ f(1−f) dp with x = (ε(p), 1).
    Mat susceptibility(const ControlVariable& theta) const;
    /// θ*(q) solving q(θ) = q; throws Domain if q is not attainable.
    ControlVariable control_of(const StateDensity& q) const;
};

/// Anisotropic exchange ring with optional longitudinal field:
/// H = Σᵢ [(J/2)(σ⁺ᵢσ⁻ᵢ₊₁ + h.c.) + (JΔ/4)σᶻᵢσᶻᵢ₊₁] + h Σᵢ σᶻᵢ,  Q₂ = Σᵢ σᶻᵢ/2.
struct SpinChainED {
    int sites = 8;
    double exchange = 1.0;
    double anisotropy = 0.0;
    double field = 0.0;
};

/// Raw s₀(q) = −(q²−1)² on [−2, 2]; effective entropy is its concave envelope.
struct DoubleWell {
    double raw(double q) const;
    Tabulated1D raw_table(std::size_t points) const;
    /// Closed-form envelope: 0 on [−1, 1], s₀ outside.
    EntropyFunction entropy() const;
    ReducedPressure pressure() const;
};

using Model = std::variant<Paramagnet, QuadraticModel, FreeFermionChain, SpinChainED, DoubleWell>;

std::string model_name(const Model& m);
int model_dim(const Model& m);
/// Throws Unsupported for models without macroscopic closed forms (SpinChainED).
EntropyFunction model_entropy(const Model& m);
ReducedPressure model_pressure(const Model& m);

struct ClosedFormReport {
    double pi = 0.0;
    StateDensity q;
    double s = 0.0;
    double pi_numeric = 0.0;
    StateDensity q_numeric;
    /// max over |π − π_num|, |q − q_num|, |s − (π + θ·q)| recomputed from s(q).
    double max_deviation_from_numeric = 0.0;
};

/// Closed-form π, q = −π', s = π + θ·q cross-checked against numeric conjugation.
ClosedFormReport closed_form_check(const Model& m, const ControlVariable& theta);

/// (1/2π)∫ ln(1 + e^{−(θ₁ε(p)+θ₂)}) dp by the periodic trapezoid rule, refined until stable to round-off.
double free_fermion_pi_infinity(const FreeFermionChain& m, const ControlVariable& theta);

// ----- finite-volume realizations -----------------------------------------

/// Dense conserved charges Q̂ = (H, Q₂, ...) on a 2^L-dimensional space.
struct DenseRealization {
    int sites = 0;
    std::vector<Mat> charges; ///< real symmetric, mutually commuting
    std::string label;
    int dimension() const { return charges.empty() ? 0 : static_cast<int>(charges.front().rows()); }
};

/// Free-fermion fast path: L×L single-particle hopping matrix h.
struct FreeFermionRealization {
    int sites = 0;
    double hopping = 1.0;
    Mat single_particle; ///< h with h_{i,i±1} = −J (periodic)
    /// εⱼ = −2J cos(2πj/L), the eigenvalues of h.
    std::vector<double> mode_energies() const;
};

using FiniteRealization = std::variant<DenseRealization, FreeFermionRealization>;

inline constexpr int kMaxDenseDimension = 4096;

/// Default realization: free-fermion fast path for FreeFermionChain, dense
/// otherwise. Throws Capacity when 2^L exceeds 4096, Unsupported for DoubleWell.
FiniteRealization build_finite_model(const Model& m, int sites);

/// Dense Fock-space realization of the free-fermion ring (Jordan–Wigner signs).
DenseRealization build_dense_fermion_chain(const FreeFermionChain& m, int sites);

/// Largest ‖[Q̂ᵢ, Q̂ⱼ]‖ (max-norm) over charge pairs.
double max_commutator(const DenseRealization& r);

/// Periodic single-particle hopping matrix.
Mat ring_hopping_matrix(int sites, double hopping);

} // namespace lte
