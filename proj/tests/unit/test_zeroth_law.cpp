#include "lte/zeroth_law.hpp"

#include <doctest.h>

#include <cmath>

using namespace lte;

namespace {

CMat excited(int dim)
{
    CMat rho = CMat::Zero(dim, dim);
    rho(dim - 1, dim - 1) = 1.0;
    return rho;
}

} // namespace

TEST_CASE("qubit probe")
{
    const ProbeSystem p = qubit_probe(1.0);
    CHECK(p.dim() == 2);
    CHECK_NOTHROW(p.validate());
    ProbeSystem deg = p;
    deg.hamiltonian = CMat::Identity(2, 2);
    CHECK_THROWS_AS(deg.validate(), Error);
}

TEST_CASE("Gibbs state is stationary and rates obey detailed balance")
{
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const ThermalGenerator g = build_davies_generator(random_probe(4, seed), 0.8);
        CHECK(g.apply(g.gibbs()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(detailed_balance_residual(g) < 1e-14);
    }
}

TEST_CASE("evolution preserves trace and Hermiticity")
{
    const ThermalGenerator g = build_davies_generator(random_probe(3, 11), 1.5);
    const CMat rho = evolve(g, excited(3), 0.7);
    CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
    CHECK((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("stationary state is the Gibbs state")
{
    const ThermalGenerator g = build_davies_generator(random_probe(5, 4), 1.1);
    CHECK(trace_distance(stationary_state(g), g.gibbs()) < 1e-10);
    CHECK(fit_beta(g.energies, populations(g, stationary_state(g))) == doctest::Approx(1.1).epsilon(1e-8));
}

TEST_CASE("qubit relaxation rate is γ₀(1 + e^{−βω₀})")
{
    const double beta = 0.6;
    const ThermalizationReport r =
        thermalization_check(build_davies_generator(qubit_probe(1.0), beta, flat_rate(2.0)), excited(2), 30.0);
    CHECK(r.contractive);
    CHECK(r.passed);
    CHECK(r.final_distance < 1e-6);
    CHECK(r.decay_rate == doctest::Approx(2.0 * (1.0 + std::exp(-beta))).epsilon(0.01));
}

TEST_CASE("trace distance")
{
    CMat a = CMat::Zero(2, 2), b = CMat::Zero(2, 2);
    a(0, 0) = 1.0;
    b(1, 1) = 1.0;
    CHECK(trace_distance(a, b) == doctest::Approx(1.0));
    CHECK(trace_distance(a, a) == 0.0);
}

TEST_CASE("probe reads the local temperature of a steady profile")
{
    HydroScenario sc;
    sc.model = hydro_model(Paramagnet{});
    sc.onsager = constant_onsager(1, 1.0);
    sc.cells = 64;
    sc.left = Boundary::reservoir(Vec::Constant(1, 0.5));
    sc.right = Boundary::reservoir(Vec::Constant(1, 1.5));
    sc.initial_q = [&m = sc.model](double x) { return m.q_of(Vec::Constant(1, 0.5 + x)); };
    const SteadyState ss = steady_state(sc);
    for (double x : {0.25, 0.75}) {
        const ProbeReport r = local_probe_scenario(ss.state, sc, x, qubit_probe(1.0), excited(2), 40.0);
        CHECK(r.beta == doctest::Approx(0.5 + x).epsilon(1e-6));
        const Vec p = r.stationary_populations;
        CHECK(p[1] / p[0] == doctest::Approx(std::exp(-(0.5 + x))).epsilon(1e-6));
    }
}

TEST_CASE("β must be positive")
{
    CHECK_THROWS_AS(build_davies_generator(qubit_probe(1.0), -0.5), Error);
}
