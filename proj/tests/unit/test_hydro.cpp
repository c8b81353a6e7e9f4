#include "lte/hydro.hpp"

#include <doctest.h>

#include <cmath>

using namespace lte;

namespace {

HydroScenario step_box(double sign = 1.0)
{
    HydroScenario sc;
    sc.model = hydro_model(Paramagnet{});
    sc.onsager = constant_onsager(1, 1.0);
    sc.cells = 64;
    sc.t_end = 0.01;
    sc.flux_sign = sign;
    sc.record_every_step = true;
    const Vec lo = sc.model.q_of(Vec::Constant(1, 0.5));
    const Vec hi = sc.model.q_of(Vec::Constant(1, 1.5));
    sc.initial_q = [lo, hi](double x) { return x < 0.5 ? lo : hi; };
    return sc;
}

HydroScenario driven(int cells)
{
    HydroScenario sc;
    sc.model = hydro_model(QuadraticModel{});
    sc.onsager = constant_onsager(1, 1.0);
    sc.cells = cells;
    sc.left = Boundary::reservoir(Vec::Constant(1, 0.5));
    sc.right = Boundary::reservoir(Vec::Constant(1, 1.5));
    sc.initial_q = [&m = sc.model](double) { return m.q_of(Vec::Constant(1, 1.0)); };
    sc.t_end = 0.01;
    return sc;
}

double total(const HydroState& st, double h) { return st.q.sum() * h; }

} // namespace

TEST_CASE("closed box conserves the total and produces entropy")
{
    const HydroScenario sc = step_box();
    const Trajectory tr = solve(sc, Exec::Serial);
    REQUIRE(tr.states.size() > 2);
    const double h = sc.spacing();
    const double q0 = total(tr.states.front(), h);
    for (const HydroState& st : tr.states)
        CHECK(std::abs(total(st, h) - q0) < 1e-12 * tr.steps * (1.0 + std::abs(q0)));
    const EntropyDiagnostics d = entropy_diagnostics(tr, sc);
    CHECK(d.nondecreasing);
    CHECK(d.min_face_production >= -1e-12);
    CHECK(d.max_balance_residual < 1e-8);
}

TEST_CASE("heat flows from hot to cold")
{
    // θ = 1/T: the left half (θ = 0.5) is hotter, so energy moves right.
    const HydroScenario sc = step_box();
    const HydroState st = initial_state(sc);
    const Mat j = face_fluxes(st, sc);
    CHECK(j(0, sc.cells / 2) > 0.0);
    CHECK(j(0, 0) == 0.0);
    CHECK(j(0, sc.cells) == 0.0);
}

TEST_CASE("reversed flux orientation violates the second law")
{
    const HydroScenario sc = step_box(-1.0);
    HydroState st = initial_state(sc);
    const EntropyBalance b = entropy_balance(st, sc);
    CHECK(b.min_face_production < 0.0);
}

TEST_CASE("stable time step is enforced")
{
    const HydroScenario sc = step_box();
    const HydroState st = initial_state(sc);
    const double dt = stable_time_step(st, sc);
    CHECK(dt > 0.0);
    CHECK_NOTHROW(step(st, sc, dt));
    CHECK_THROWS_AS(step(st, sc, 2.0 * dt), Error);
}

TEST_CASE("driven steady state is linear in θ for constant L")
{
    const HydroScenario sc = driven(40);
    const SteadyState ss = steady_state(sc);
    CHECK(ss.residual < 1e-10);
    for (int i = 0; i < sc.cells; ++i)
        CHECK(ss.state.theta(0, i) == doctest::Approx(0.5 + sc.center(i)).epsilon(1e-6));
}

TEST_CASE("diffusive scaling with integer λ")
{
    HydroScenario sc = step_box();
    sc.cells = 32;
    sc.record_every_step = false;
    const Vec base = sc.model.q_of(Vec::Constant(1, 1.0));
    const Vec amp = sc.model.q_of(Vec::Constant(1, 1.2)) - base;
    sc.initial_q = [base, amp](double x) { return Vec(base + amp * std::cos(M_PI * x)); };
    const ScaleReport r = scale_invariance_check(sc, 2, 0.005);
    CHECK(r.passed);
    CHECK(r.max_deviation <= r.tolerance);
}

TEST_CASE("scenario validation")
{
    HydroScenario sc = step_box();
    sc.cells = 1;
    CHECK_THROWS_AS(sc.validate(), Error);
    sc = step_box();
    sc.left = Boundary::periodic();
    CHECK_THROWS_AS(sc.validate(), Error);
    CHECK_THROWS_AS(hydro_model(Model{SpinChainED{}}), Error);
}

TEST_CASE("periodic boundary conserves the total")
{
    HydroScenario sc = step_box();
    sc.left = sc.right = Boundary::periodic();
    const Trajectory tr = solve(sc);
    const double h = sc.spacing();
    CHECK(total(tr.states.back(), h) == doctest::Approx(total(tr.states.front(), h)).epsilon(1e-12));
}

TEST_CASE("free-fermion hydro stays in the attainable region")
{
    HydroScenario sc;
    sc.model = hydro_model(FreeFermionChain{});
    sc.onsager = constant_onsager(2, 1.0);
    sc.cells = 16;
    sc.t_end = 0.005;
    const Vec a = sc.model.q_of((Vec(2) << 0.6, 0.0).finished());
    const Vec b = sc.model.q_of((Vec(2) << 1.4, 0.3).finished());
    sc.initial_q = [a, b](double x) { return Vec(a + (b - a) * x); };
    const Trajectory tr = solve(sc);
    const HydroState& last = tr.states.back();
    CHECK(last.theta.allFinite());
    for (int i = 0; i < last.cells(); ++i)
        CHECK(max_abs(sc.model.q_of(last.theta.col(i)) - last.q.col(i)) < 1e-12);
}
