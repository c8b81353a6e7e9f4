#include "lte/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <string>

namespace lte {

void apply_thread_cap_from_env()
{
    const char* env = std::getenv("LTE_LAB_THREADS");
    if (env == nullptr)
        return;
    try {
        const int cap = std::stoi(env);
        if (cap > 0)
            omp_set_num_threads(std::min(cap, omp_get_num_procs()));
    } catch (const std::exception&) {
        // non-numeric values are ignored
    }
}

int max_threads() { return omp_get_max_threads(); }

namespace kernels {

namespace {

struct ModeTerms {
    std::vector<double> lp, e, n, ee, en, nn, s;
    explicit ModeTerms(std::size_t m) : lp(m), e(m), n(m), ee(m), en(m), nn(m), s(m) {}
};

inline void mode_term(ModeTerms& t, std::size_t k, double eps, double theta1, double theta2)
{
    const double a = theta1 * eps + theta2;
    const double f = fermi(a);
    const double g = fermi(-a); // 1 - f, accurate in both tails
    const double fg = f * g;
    t.lp[k] = softplus(-a);
    t.e[k] = eps * f;
    t.n[k] = f;
    t.ee[k] = eps * eps * fg;
    t.en[k] = eps * fg;
    t.nn[k] = fg;
    t.s[k] = -(xlogx(f) + xlogx(g));
}

FermionSums reduce(const ModeTerms& t)
{
    FermionSums out;
    out.log_partition = compensated_sum(t.lp);
    out.energy = compensated_sum(t.e);
    out.number = compensated_sum(t.n);
    out.var_energy = compensated_sum(t.ee);
    out.cov_energy_number = compensated_sum(t.en);
    out.var_number = compensated_sum(t.nn);
    out.entropy = compensated_sum(t.s);
    return out;
}

} // namespace

FermionSums fermion_mode_sums(std::span<const double> mode_energies, double theta1, double theta2, Exec exec)
{
    const std::size_t m = mode_energies.size();
    ModeTerms terms(m);
    const long long mm = static_cast<long long>(m);
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (long long k = 0; k < mm; ++k)
            mode_term(terms, static_cast<std::size_t>(k), mode_energies[k], theta1, theta2);
    } else {
        for (std::size_t k = 0; k < m; ++k)
            mode_term(terms, k, mode_energies[k], theta1, theta2);
    }
    return reduce(terms);
}

void face_fluxes(const Mat& left, const Mat& right, std::span<const double> distance,
    const OnsagerFn& onsager, double sign, Mat& out, Exec exec)
{
    const Eigen::Index faces = left.cols();
    out.resize(left.rows(), faces);
    auto one = [&](Eigen::Index f) {
        const Vec mid = 0.5 * (left.col(f) + right.col(f));
        out.col(f) = sign * onsager(mid) * (right.col(f) - left.col(f)) / distance[static_cast<std::size_t>(f)];
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (Eigen::Index f = 0; f < faces; ++f)
            one(f);
    } else {
        for (Eigen::Index f = 0; f < faces; ++f)
            one(f);
    }
}

void smeared_draws(const Mat& loadings, std::span<const int> cells, const CounterRng& rng,
    std::uint64_t first_sample, std::span<double> out, Exec exec)
{
    const Eigen::Index n = loadings.rows();
    const std::size_t ncell = cells.size();
    auto one = [&](std::size_t s) {
        const std::uint64_t sample = first_sample + s;
        CompensatedSum acc;
        for (std::size_t i = 0; i < ncell; ++i)
            for (Eigen::Index k = 0; k < n; ++k)
                acc.add(loadings(k, static_cast<Eigen::Index>(i))
                    * rng.normal(static_cast<std::uint64_t>(cells[i]), sample, static_cast<std::uint64_t>(k)));
        out[s] = acc.value();
    };
    const long long ns = static_cast<long long>(out.size());
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (long long s = 0; s < ns; ++s)
            one(static_cast<std::size_t>(s));
    } else {
        for (std::size_t s = 0; s < out.size(); ++s)
            one(s);
    }
}

void discrete_conjugate(std::span<const double> q, std::span<const double> s,
    std::span<const double> theta, std::span<double> out, Exec exec)
{
    auto one = [&](std::size_t k) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < q.size(); ++i)
            best = std::max(best, s[i] - theta[k] * q[i]);
        out[k] = best;
    };
    const long long nt = static_cast<long long>(theta.size());
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (long long k = 0; k < nt; ++k)
            one(static_cast<std::size_t>(k));
    } else {
        for (std::size_t k = 0; k < theta.size(); ++k)
            one(k);
    }
}

} // namespace kernels
} // namespace lte
