#include "lte/models.hpp"

#include <doctest.h>

#include <cmath>

using namespace lte;

TEST_CASE("paramagnet closed forms")
{
    const Paramagnet pm;
    const ReducedPressure pi = pm.pressure();
    // Frozen at θ = 1: ln(2 cosh 1) and s = π + θq with q = −tanh 1.
    CHECK(pi.value(ControlVariable{1.0}) == doctest::Approx(1.1269280110429727).epsilon(1e-15));
    CHECK(pi.gradient(ControlVariable{1.0})[0] == doctest::Approx(std::tanh(1.0)).epsilon(1e-14));
    CHECK(pm.entropy().value(StateDensity{-std::tanh(1.0)}) == doctest::Approx(0.3653338550872076).epsilon(1e-12));
    CHECK(pm.entropy().value(StateDensity{0.0}) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("quadratic model is its own conjugate")
{
    const QuadraticModel qm;
    CHECK(qm.pressure().value(ControlVariable{0.8}) == doctest::Approx(0.32));
    CHECK(qm.entropy().value(StateDensity{-0.8}) == doctest::Approx(-0.32));
}

TEST_CASE("free-fermion pressure at θ = (1, 0)")
{
    const FreeFermionChain ff;
    // (1/2π)∫ ln(1 + e^{2cos p}) dp, 40-digit reference.
    CHECK(std::abs(ff.pi_infinity(ControlVariable{1.0, 0.0}) - 0.9174089806518491457) < 2e-16);
    // Half filling by particle-hole symmetry.
    CHECK(ff.density(ControlVariable{0.7, 0.0})[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("free-fermion susceptibility is the Hessian of π")
{
    const FreeFermionChain ff;
    const ControlVariable t{0.9, -0.4};
    const Mat chi = ff.susceptibility(t);
    const Mat fd = fd_hessian_richardson([&](const Vec& v) { return ff.pi_infinity(ControlVariable(v)); }, t.theta, 1e-2);
    CHECK(max_abs(chi - fd) < 1e-8);
    CHECK(chi(0, 1) == doctest::Approx(chi(1, 0)));
}

TEST_CASE("free-fermion control_of inverts density")
{
    const FreeFermionChain ff;
    for (const ControlVariable& t : {ControlVariable{0.5, 0.2}, ControlVariable{2.0, -1.0}, ControlVariable{3.0, 1.0}}) {
        const StateDensity q = ff.density(t);
        const ControlVariable back = ff.control_of(q);
        CHECK((back.theta - t.theta).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("free-fermion attainability")
{
    const FreeFermionChain ff;
    // |e| must stay below (2J/π) sin(πn): the ground-state energy at that filling.
    CHECK_THROWS_AS(ff.control_of(StateDensity{-0.6, 0.1}), Error);
    CHECK_THROWS_AS(ff.control_of(StateDensity{0.0, 1.0}), Error);
    CHECK_NOTHROW(ff.control_of(StateDensity{-0.3, 0.3}));
}

TEST_CASE("double well: envelope and pressure")
{
    const DoubleWell dw;
    CHECK(dw.raw(0.0) == doctest::Approx(-1.0));
    CHECK(dw.entropy().value(StateDensity{0.3}) == doctest::Approx(0.0));
    CHECK(dw.entropy().value(StateDensity{1.5}) == doctest::Approx(dw.raw(1.5)));
    // π(0) = sup s = 0, a kink with slopes ±1.
    CHECK(dw.pressure().value(ControlVariable{0.0}) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("closed-form cross-checks agree with numeric conjugation")
{
    CHECK(closed_form_check(Paramagnet{}, ControlVariable{0.8}).max_deviation_from_numeric < 1e-8);
    CHECK(closed_form_check(QuadraticModel{}, ControlVariable{-1.2}).max_deviation_from_numeric < 1e-8);
    CHECK(closed_form_check(FreeFermionChain{}, ControlVariable{1.3, 0.4}).max_deviation_from_numeric < 1e-8);
}

TEST_CASE("model dispatch")
{
    CHECK(model_name(Model{FreeFermionChain{}}) == "free_fermion");
    CHECK(model_dim(Model{FreeFermionChain{}}) == 2);
    CHECK(model_dim(Model{SpinChainED{}}) == 2);
    CHECK_THROWS_AS(model_entropy(Model{SpinChainED{}}), Error);
}

TEST_CASE("finite realizations")
{
    const FiniteRealization ff = build_finite_model(FreeFermionChain{}, 6);
    REQUIRE(std::holds_alternative<FreeFermionRealization>(ff));
    const auto modes = std::get<FreeFermionRealization>(ff).mode_energies();
    CHECK(modes.size() == 6);
    CHECK(modes[0] == doctest::Approx(-2.0));

    const DenseRealization dense = build_dense_fermion_chain(FreeFermionChain{}, 5);
    CHECK(dense.dimension() == 32);
    CHECK(max_commutator(dense) < 1e-12);

    const FiniteRealization spins = build_finite_model(SpinChainED{6, 1.0, 0.5, 0.2}, 6);
    CHECK(max_commutator(std::get<DenseRealization>(spins)) < 1e-12);

    CHECK_THROWS_AS(build_finite_model(SpinChainED{16}, 16), Error);
    CHECK_THROWS_AS(build_finite_model(DoubleWell{}, 4), Error);
}

TEST_CASE("ring hopping matrix is symmetric and periodic")
{
    const Mat h = ring_hopping_matrix(5, 1.0);
    CHECK(max_abs(h - h.transpose()) == 0.0);
    CHECK(h(0, 4) == doctest::Approx(-1.0));
}
