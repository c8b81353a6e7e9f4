#pragma once
/// \file
/// \brief Data-parallel inner loops.
///
/// Every kernel has a serial reference and an OpenMP variant selected by
/// `Exec`. Per-element work is independent and reductions are done serially
/// with compensated summation after the parallel map, so both variants return
/// bit-identical results regardless of thread count.

#include "lte/numerics.hpp"

#include <functional>
#include <span>
#include <vector>

namespace lte {

enum class Exec { Serial, Parallel };

/// Honours LTE_LAB_THREADS (if set and positive) as a cap on OpenMP threads.
void apply_thread_cap_from_env();
int max_threads();

namespace kernels {

/// Grand-canonical sums over single-particle modes with a = θ₁εₖ + θ₂.
struct FermionSums {
    double log_partition = 0.0; ///< Σ ln(1 + e^{-a})
    double energy = 0.0;        ///< Σ ε f
    double number = 0.0;        ///< Σ f
    double var_energy = 0.0;    ///< Σ ε² f(1-f)
    double cov_energy_number = 0.0;
    double var_number = 0.0;    ///< Σ f(1-f)
    double entropy = 0.0;       ///< -Σ [f ln f + (1-f) ln(1-f)]
};

FermionSums fermion_mode_sums(std::span<const double> mode_energies, double theta1, double theta2,
    Exec exec = Exec::Parallel);

/// Two-point face fluxes j = sign·L(θ̄)(θ_R − θ_L)/d with θ̄ the face mean.
/// Columns of `left`, `right` are the per-face states; `distance` per face.
using OnsagerFn = std::function<Mat(const Vec&)>;
void face_fluxes(const Mat& left, const Mat& right, std::span<const double> distance,
    const OnsagerFn& onsager, double sign, Mat& out, Exec exec = Exec::Parallel);

/// One smeared draw per sample: Σᵢ Σₖ loading(k,i)·z(cell[i], sample, k).
/// Draws are keyed by (cell index, sample index, component) so the result
/// matches a full-field sample contracted against the same test function.
void smeared_draws(const Mat& loadings, std::span<const int> cells, const CounterRng& rng,
    std::uint64_t first_sample, std::span<double> out, Exec exec = Exec::Parallel);

/// π_k = max_i (s_i − θ_k q_i) on tabulated data.
void discrete_conjugate(std::span<const double> q, std::span<const double> s,
    std::span<const double> theta, std::span<double> out, Exec exec = Exec::Parallel);

} // namespace kernels
} // namespace lte
