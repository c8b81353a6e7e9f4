#pragma once
/// \file
/// \brief Finite-volume quantum statistics: Gibbs states, reduced pressure π_L
/// and its thermodynamic limit, moment/Hessian duality, the variational (GTS)
/// and KMS characterisations of equilibrium, thermodynamic completeness, and
/// the local-restriction check for inhomogeneous Gibbs profiles.

#include "lte/kernels.hpp"
#include "lte/models.hpp"

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace lte {

/// Joint eigenbasis of commuting dense charges; θ-independent, computed once.
struct JointSpectrum {
    int sites = 0;
    Mat vectors;           ///< columns: joint eigenvectors
    Mat charge_values;     ///< (dim × n): eigenvalue of Q̂ⱼ on vector k
    std::vector<Mat> charges;
};

JointSpectrum diagonalize(const DenseRealization& r);

struct DenseGibbs {
    std::shared_ptr<const JointSpectrum> spectrum;
    std::vector<double> probabilities;
};

struct FreeFermionGibbs {
    std::vector<double> mode_energies;
    std::vector<double> occupations;
};

/// exp(−θ·Q̂)/Z at finite volume, dense or free-fermion backend.
class FiniteGibbsState {
public:
    FiniteGibbsState(ControlVariable theta, int sites, double log_partition, std::variant<DenseGibbs, FreeFermionGibbs> b);

    const ControlVariable& theta() const { return theta_; }
    int sites() const { return sites_; }
    double log_partition() const { return log_z_; }
    bool is_dense() const { return std::holds_alternative<DenseGibbs>(backend_); }
    const DenseGibbs& dense() const { return std::get<DenseGibbs>(backend_); }
    const FreeFermionGibbs& free_fermion() const { return std::get<FreeFermionGibbs>(backend_); }

    /// Dense density matrix ρ (dense backend only).
    Mat density_matrix() const;

private:
    ControlVariable theta_;
    int sites_;
    double log_z_;
    std::variant<DenseGibbs, FreeFermionGibbs> backend_;
};

/// The control → Gibbs-state map at fixed finite volume.
class GibbsStateFactory {
public:
    explicit GibbsStateFactory(const FiniteRealization& r, Exec exec = Exec::Parallel);

    FiniteGibbsState at(const ControlVariable& theta) const;
    int sites() const { return sites_; }
    int dim() const { return n_; }
    bool dense() const { return static_cast<bool>(spectrum_); }
    const JointSpectrum& spectrum() const { return *spectrum_; }

private:
    int sites_ = 0;
    int n_ = 0;
    Exec exec_;
    std::shared_ptr<const JointSpectrum> spectrum_;
    std::vector<double> modes_;
};

/// π_L(θ) = L⁻¹ ln Tr exp(−θ·Q̂_L).
double pi_L(const Model& m, const ControlVariable& theta, int sites, Exec exec = Exec::Parallel);
double pi_L(const GibbsStateFactory& f, const ControlVariable& theta);

struct PiConvergenceReport {
    std::vector<int> sites;
    std::vector<double> values;
    std::vector<double> deviations;  ///< |π_L − π_∞|; empty when no reference exists
    std::vector<double> increments;  ///< |π_{L_k} − π_{L_{k−1}}|
    double reference = 0.0;          ///< π_∞ by quadrature (free fermions)
    bool has_reference = false;
    double extrapolated = 0.0;
    double extrapolation_deviation = 0.0;
    double fitted_order = 0.0;
    /// Deviations strictly decrease while above `resolution_floor`, then stay below it.
    bool monotone = true;
    std::vector<int> flagged; ///< indices where monotonicity failed
    double resolution_floor = 1e-13;
};

PiConvergenceReport pi_convergence(const Model& m, const ControlVariable& theta, const std::vector<int>& sites);

struct GibbsMoments {
    StateDensity density; ///< ⟨Q̂⟩/L
    Mat covariance;       ///< Cov(Q̂)/L
};

GibbsMoments gibbs_moments(const FiniteGibbsState& state);

/// ŝ_L = −L⁻¹ Tr ρ ln ρ.
double entropy_density_L(const FiniteGibbsState& state);

struct Perturbation {
    double lambda = 0.0;
    CVec direction; ///< pure state σ = |ψ⟩⟨ψ| (normalised internally); empty means σ = ρ_Gibbs
};

/// Haar-like random pure state from a seed.
CVec random_pure_state(int dim, std::uint64_t seed);

/// (G + G†)/2 with complex Gaussian G, scaled to unit max-norm.
CMat random_hermitian(int dim, std::uint64_t seed);

/// π_L'' by Richardson-extrapolated central differences of π_L.
Mat pi_L_hessian_fd(const GibbsStateFactory& f, const ControlVariable& theta, double step = 2e-3);

struct GtsEntry {
    double lambda = 0.0;
    double functional = 0.0; ///< ŝ(ρ') − θ·q̂(ρ')
    double gap = 0.0;        ///< π_L − functional
};

struct GtsReport {
    double pi_L = 0.0;
    std::vector<GtsEntry> entries;
    bool holds = true; ///< every gap ≥ −1e-12
};

/// Free-energy functional ŝ(ρ) − θ·Tr(ρQ̂)/L for an arbitrary density matrix.
double gts_functional(const JointSpectrum& spec, const ControlVariable& theta, const CMat& rho);

GtsReport gts_variational_check(const GibbsStateFactory& f, const ControlVariable& theta,
    const std::vector<Perturbation>& perturbations);

/// H_θ = θ₁⁻¹ θ·Q̂ (dense).
Mat build_effective_hamiltonian(const DenseRealization& r, const ControlVariable& theta);
/// Single-particle h_θ = h + (θ₂/θ₁) I (free-fermion fast path).
Mat build_effective_hamiltonian(const FreeFermionRealization& r, const ControlVariable& theta);

struct NamedOperator {
    std::string label;
    CMat op;
};

struct KmsEntry {
    std::string a_label;
    std::string b_label;
    double tau = 0.0;
    std::complex<double> lhs; ///< ⟨α_τ(A) B⟩
    std::complex<double> rhs; ///< ⟨B α_{τ+iβ}(A)⟩
    double residual = 0.0;
};

struct KMSCheckReport {
    std::vector<KmsEntry> entries;
    double max_residual = 0.0;
    double beta = 0.0;
};

/// KMS residuals via the spectral decomposition of H at complex times.
KMSCheckReport kms_check(const CMat& hamiltonian, double beta, const NamedOperator& a, const NamedOperator& b,
    const std::vector<double>& taus);

enum class Verdict { Pass, Fail, Inconclusive, Vacuous };
std::string_view to_string(Verdict v) noexcept;

struct CompletenessWitness {
    std::string shared; ///< which density coincides
    ControlVariable theta_a, theta_b;
    StateDensity q_a, q_b;
};

struct CompletenessReport {
    double min_hessian_eigenvalue = 0.0;
    Verdict injectivity = Verdict::Fail;   ///< condition (i)
    Verdict minimality = Verdict::Fail;    ///< condition (ii)
    std::vector<CompletenessWitness> witnesses;
};

CompletenessReport completeness_check(const FreeFermionChain& m, const std::vector<ControlVariable>& grid);
CompletenessReport completeness_check(const Paramagnet& m, const std::vector<ControlVariable>& grid);

/// Inhomogeneous control profile on an open chain of `sites` fermion sites.
struct LocalGibbsProfile {
    std::function<ControlVariable(double)> theta; ///< x = i/L ↦ θ
    int sites = 0;
    double hopping = 1.0;

    /// A = Σ θ₁(bond)·h + diag(θ₂); bond θ₁ is the arithmetic mean of its endpoints.
    Mat generator() const;
};

struct RestrictionEntry {
    double x = 0.0;
    int center_site = 0;
    double density = 0.0;
    double energy = 0.0;
    double reference_density = 0.0;
    double reference_energy = 0.0;
    double density_deviation = 0.0;
    double energy_deviation = 0.0;
};

struct RestrictionReport {
    int sites = 0;
    int window = 0;
    std::vector<RestrictionEntry> entries;
};

/// Window averages of on-site density and bond energy compared with the
/// homogeneous infinite-volume Gibbs values at θ(x).
RestrictionReport local_restriction_check(const LocalGibbsProfile& profile, int window, const std::vector<double>& centers);

} // namespace lte
