// Serial reference vs OpenMP variant for each kernel. Arg(1) selects Parallel.

#include "lte/kernels.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

namespace {

lte::Exec exec_of(const benchmark::State& s) { return s.range(1) ? lte::Exec::Parallel : lte::Exec::Serial; }

void BM_FermionModeSums(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> eps(n);
    for (std::size_t k = 0; k < n; ++k)
        eps[k] = -2.0 * std::cos(2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n));
    for (auto _ : state)
        benchmark::DoNotOptimize(lte::kernels::fermion_mode_sums(eps, 1.0, 0.3, exec_of(state)));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}

void BM_FaceFluxes(benchmark::State& state)
{
    const auto m = static_cast<Eigen::Index>(state.range(0));
    lte::Mat left(2, m), right(2, m), out;
    for (Eigen::Index i = 0; i < m; ++i) {
        left.col(i) << 1.0 + 0.001 * static_cast<double>(i), 0.1;
        right.col(i) << 1.0 + 0.001 * static_cast<double>(i + 1), 0.1;
    }
    std::vector<double> d(static_cast<std::size_t>(m), 1.0 / static_cast<double>(m));
    const lte::kernels::OnsagerFn onsager = [](const lte::Vec& th) {
        return lte::Mat(std::max(th[0], 0.0) * lte::Mat::Identity(2, 2));
    };
    for (auto _ : state) {
        lte::kernels::face_fluxes(left, right, d, onsager, 1.0, out, exec_of(state));
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(m));
}

void BM_SmearedDraws(benchmark::State& state)
{
    const int cells = 200;
    lte::Mat loadings = lte::Mat::Constant(1, cells, 0.01);
    std::vector<int> idx(cells);
    for (int i = 0; i < cells; ++i)
        idx[static_cast<std::size_t>(i)] = i;
    std::vector<double> out(static_cast<std::size_t>(state.range(0)));
    const lte::CounterRng rng(42);
    for (auto _ : state) {
        lte::kernels::smeared_draws(loadings, idx, rng, 0, out, exec_of(state));
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_DiscreteConjugate(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> q(n), s(n), theta(n), out(n);
    for (std::size_t i = 0; i < n; ++i) {
        q[i] = -2.0 + 4.0 * static_cast<double>(i) / static_cast<double>(n - 1);
        s[i] = -(q[i] * q[i] - 1.0) * (q[i] * q[i] - 1.0);
        theta[i] = -3.0 + 6.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    for (auto _ : state) {
        lte::kernels::discrete_conjugate(q, s, theta, out, exec_of(state));
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n * n));
}

} // namespace

BENCHMARK(BM_FermionModeSums)->ArgsProduct({{1024, 65536}, {0, 1}});
BENCHMARK(BM_FaceFluxes)->ArgsProduct({{256, 4096}, {0, 1}});
BENCHMARK(BM_SmearedDraws)->ArgsProduct({{10000}, {0, 1}});
BENCHMARK(BM_DiscreteConjugate)->ArgsProduct({{801, 3201}, {0, 1}});

int main(int argc, char** argv)
{
    lte::apply_thread_cap_from_env();
    benchmark::Initialize(&argc, argv);
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
