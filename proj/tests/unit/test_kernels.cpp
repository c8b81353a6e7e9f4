// Serial reference vs OpenMP variant: results must be bit identical.

#include "lte/kernels.hpp"

#include <doctest.h>
#include <omp.h>

#include <cmath>
#include <cstdlib>

using namespace lte;

namespace {

struct ForceThreads {
    explicit ForceThreads(int n) : saved(omp_get_max_threads()) { omp_set_num_threads(n); }
    ~ForceThreads() { omp_set_num_threads(saved); }
    int saved;
};

std::vector<double> band(std::size_t n)
{
    std::vector<double> e(n);
    for (std::size_t k = 0; k < n; ++k)
        e[k] = -2.0 * std::cos(2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n));
    return e;
}

} // namespace

TEST_CASE("fermion mode sums")
{
    const ForceThreads t(4);
    const std::vector<double> e = band(4097);
    const auto a = kernels::fermion_mode_sums(e, 1.3, -0.2, Exec::Serial);
    const auto b = kernels::fermion_mode_sums(e, 1.3, -0.2, Exec::Parallel);
    CHECK(a.log_partition == b.log_partition);
    CHECK(a.energy == b.energy);
    CHECK(a.number == b.number);
    CHECK(a.var_energy == b.var_energy);
    CHECK(a.cov_energy_number == b.cov_energy_number);
    CHECK(a.var_number == b.var_number);
    CHECK(a.entropy == b.entropy);
    // Half filling at θ₂ = 0 by particle-hole symmetry.
    CHECK(kernels::fermion_mode_sums(band(64), 0.7, 0.0).number == doctest::Approx(32.0).epsilon(1e-14));
}

TEST_CASE("face fluxes")
{
    const ForceThreads t(4);
    const int m = 513;
    Mat left(2, m), right(2, m), a, b;
    for (int i = 0; i < m; ++i) {
        left.col(i) << 1.0 + 0.01 * std::sin(i), 0.2;
        right.col(i) << 1.0 + 0.01 * std::sin(i + 1), 0.1;
    }
    std::vector<double> d(m, 0.01);
    const kernels::OnsagerFn l = [](const Vec& th) { return Mat(th[0] * Mat::Identity(2, 2)); };
    kernels::face_fluxes(left, right, d, l, 1.0, a, Exec::Serial);
    kernels::face_fluxes(left, right, d, l, 1.0, b, Exec::Parallel);
    CHECK((a.array() == b.array()).all());
    // j = L(θ̄)(θ_R − θ_L)/d.
    const double th = 0.5 * (left(0, 3) + right(0, 3));
    CHECK(a(0, 3) == doctest::Approx(th * (right(0, 3) - left(0, 3)) / 0.01));
    kernels::face_fluxes(left, right, d, l, -1.0, b, Exec::Serial);
    CHECK(max_abs(a + b) == 0.0);
}

TEST_CASE("smeared draws")
{
    const ForceThreads t(4);
    Mat load(1, 50);
    std::vector<int> cells(50);
    for (int i = 0; i < 50; ++i) {
        load(0, i) = 0.01 * (i + 1);
        cells[i] = 100 + i;
    }
    std::vector<double> a(1000), b(1000);
    const CounterRng rng(123);
    kernels::smeared_draws(load, cells, rng, 7, a, Exec::Serial);
    kernels::smeared_draws(load, cells, rng, 7, b, Exec::Parallel);
    CHECK(a == b);
    // Keys include the first sample index: an offset shifts the stream.
    std::vector<double> c(999);
    kernels::smeared_draws(load, cells, rng, 8, c, Exec::Parallel);
    CHECK(std::equal(c.begin(), c.end(), a.begin() + 1));
}

TEST_CASE("discrete conjugate")
{
    const ForceThreads t(4);
    const std::size_t n = 801;
    std::vector<double> q(n), s(n), th(201), a(201), b(201);
    for (std::size_t i = 0; i < n; ++i) {
        q[i] = -2.0 + 4.0 * static_cast<double>(i) / (n - 1);
        s[i] = -q[i] * q[i];
    }
    for (std::size_t k = 0; k < th.size(); ++k)
        th[k] = -3.0 + 0.03 * static_cast<double>(k);
    kernels::discrete_conjugate(q, s, th, a, Exec::Serial);
    kernels::discrete_conjugate(q, s, th, b, Exec::Parallel);
    CHECK(a == b);
    // π(θ) = θ²/4 for s = −q².
    CHECK(a[100] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(a[150] == doctest::Approx(1.5 * 1.5 / 4.0).epsilon(1e-4));
}

TEST_CASE("thread cap from the environment")
{
    setenv("LTE_LAB_THREADS", "1", 1);
    apply_thread_cap_from_env();
    CHECK(max_threads() == 1);
    unsetenv("LTE_LAB_THREADS");
}

TEST_CASE("counter RNG is a pure function of its keys")
{
    const CounterRng r(99);
    CHECK(r.uniform(1, 2, 3) == r.uniform(1, 2, 3));
    CHECK(r.uniform(1, 2, 3) != r.uniform(1, 2, 4));
    CHECK(r.uniform(1, 2, 3) != CounterRng(100).uniform(1, 2, 3));
    double m = 0.0;
    for (std::uint64_t k = 0; k < 20000; ++k)
        m += r.normal(0, 0, k);
    CHECK(std::abs(m / 20000.0) < 3.0 / std::sqrt(20000.0));
}
