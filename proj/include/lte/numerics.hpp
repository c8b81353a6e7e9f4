#pragma once
/// \file
/// \brief Small numerical helpers shared across modules: compensated sums,
/// finite differences, stable log-sum-exp, a counter-based RNG, sample moments.

#include "lte/core.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace lte {

/// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(double x)
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double compensated_sum(std::span<const double> xs);

/// ln(1 + e^x) without overflow.
inline double softplus(double x)
{
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

/// Fermi function 1/(1 + e^a).
inline double fermi(double a)
{
    if (a >= 0.0) {
        const double e = std::exp(-a);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(a));
}

/// x ln x with the 0 ln 0 = 0 convention.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double log_sum_exp(std::span<const double> xs);

/// Central-difference step used throughout: 1e-4·(1+|x|).
inline double fd_step(double x) { return 1e-4 * (1.0 + std::abs(x)); }

using ScalarField = std::function<double(const Vec&)>;
using VectorField = std::function<Vec(const Vec&)>;

Vec fd_gradient(const ScalarField& f, const Vec& x);
/// Hessian from second differences of values.
Mat fd_hessian(const ScalarField& f, const Vec& x);

/// Central second differences at steps h and h/2 combined by Richardson, O(h⁴).
Mat fd_hessian_richardson(const ScalarField& f, const Vec& x, double h);
/// Symmetrised Jacobian of a gradient field (Hessian from first differences).
Mat fd_jacobian_sym(const VectorField& g, const Vec& x);

/// Max-norm.
inline double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, counter), so results do not depend on evaluation order.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    static std::uint64_t mix(std::uint64_t z)
    {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t bits(std::uint64_t a, std::uint64_t b, std::uint64_t counter) const
    {
        return mix(mix(mix(seed_ ^ mix(a)) ^ b) ^ mix(counter + 0x632be59bd9b4e019ULL));
    }

    /// Uniform in (0, 1).
    double uniform(std::uint64_t a, std::uint64_t b, std::uint64_t counter) const
    {
        return (static_cast<double>(bits(a, b, counter) >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; consumes counters 2k and 2k+1.
    double normal(std::uint64_t a, std::uint64_t b, std::uint64_t k) const
    {
        const double u1 = uniform(a, b, 2 * k);
        const double u2 = uniform(a, b, 2 * k + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
};

struct SampleMoments {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0; ///< unbiased
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    /// Standard error of the variance estimate for Gaussian data, σ²·sqrt(2/(N-1)).
    double variance_standard_error() const;
};

SampleMoments sample_moments(std::span<const double> xs);

double sample_covariance(std::span<const double> xs, std::span<const double> ys);

/// Golden-section maximisation of a unimodal function on [a, b].
double golden_section_max(const std::function<double(double)>& f, double a, double b, double tol);

} // namespace lte
