#include "lte/models.hpp"
#include "lte/thermo_core.hpp"

#include <doctest.h>

#include <cmath>

using namespace lte;

namespace {

EntropyFunction parabola()
{
    // s(q) = −q²/2 on [−5, 5], so π(θ) = θ²/2 and q* = −θ for |θ| < 5.
    return EntropyFunction(1, Box::interval(-5.0, 5.0), Box::interval(-5.0, 5.0),
        [](const Vec& q) { return -0.5 * q.squaredNorm(); });
}

} // namespace

TEST_CASE("box membership and faces")
{
    const Box b = Box::interval(-1.0, 2.0);
    CHECK(b.contains(Vec::Constant(1, 0.5)));
    CHECK_FALSE(b.contains(Vec::Constant(1, 2.5)));
    CHECK(b.on_boundary(Vec::Constant(1, 2.0)));
    CHECK_FALSE(Box::unbounded(2).on_boundary(Vec::Zero(2)));
    CHECK(Box::interval(1.0, 0.0).empty());
}

TEST_CASE("tabulated interpolation")
{
    const Tabulated1D t = Tabulated1D::sample([](double x) { return 2.0 * x + 1.0; }, 0.0, 1.0, 11);
    CHECK(t(0.35) == doctest::Approx(1.7).epsilon(1e-14));
    CHECK(t.slope(0.35) == doctest::Approx(2.0).epsilon(1e-12));
    Tabulated1D bad{{0.0, 0.0, 1.0}, {0.0, 1.0, 2.0}};
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("legendre transform of a parabola")
{
    const EntropyFunction s = parabola();
    for (double th : {-2.0, -0.3, 0.0, 1.1}) {
        const LegendreResult r = legendre_transform(s, ControlVariable{th});
        CHECK(r.pi == doctest::Approx(0.5 * th * th).epsilon(1e-12));
        CHECK(r.q_star[0] == doctest::Approx(-th).epsilon(1e-9));
    }
    const EntropyFunction open(1, Box::unbounded(1), Box::unbounded(1), [](const Vec& q) { return -q.squaredNorm(); });
    CHECK_THROWS_AS(legendre_transform(open, ControlVariable{0.5}), Error);
}

TEST_CASE("two-dimensional legendre transform uses Newton ascent")
{
    Mat a(2, 2);
    a << 2.0, 0.5, 0.5, 1.0;
    const EntropyFunction s(2, Box::unbounded(2), Box::unbounded(2), [a](const Vec& q) { return -0.5 * q.dot(a * q); });
    const Vec th = (Vec(2) << 0.4, -1.0).finished();
    const LegendreResult r = legendre_transform(s, ControlVariable(th));
    const Vec q = -a.ldlt().solve(th);
    CHECK((r.q_star.q - q).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(r.pi == doctest::Approx(0.5 * th.dot(a.ldlt().solve(th))).epsilon(1e-10));
}

TEST_CASE("hessian duality for closed-form models")
{
    const Paramagnet pm;
    for (double th : {0.3, 1.0, 2.5})
        CHECK(hessian_pair_check(pm.entropy(), pm.pressure(), ControlVariable{th}) < 1e-6);
    const QuadraticModel qm;
    CHECK(hessian_pair_check(qm.entropy(), qm.pressure(), ControlVariable{0.7}) < 1e-10);
}

TEST_CASE("theta_of_q policies")
{
    const Paramagnet pm;
    // e > 0 corresponds to negative temperature for a two-level system.
    const ControlVariable t = theta_of_q(pm.entropy(), StateDensity{0.3});
    CHECK(t[0] < 0.0);
    CHECK_THROWS_AS(theta_of_q(pm.entropy(), StateDensity{0.3}, BetaPolicy::RequirePositive), Error);
    try {
        theta_of_q(pm.entropy(), StateDensity{-1.0});
        FAIL("expected a divergence at the band edge");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::GradientDivergence);
    }
}

TEST_CASE("one-sided slopes detect kinks")
{
    const auto abs_fn = [](double x) { return std::abs(x); };
    const OneSidedSlopes k = one_sided_slopes(abs_fn, 0.0, 1e-3);
    CHECK(k.left == doctest::Approx(-1.0));
    CHECK(k.right == doctest::Approx(1.0));
    CHECK(is_kink(k));
    CHECK_FALSE(is_kink(one_sided_slopes([](double x) { return x * x; }, 0.3, 1e-3)));
}

TEST_CASE("double-well tangent set at zero is the coexistence interval")
{
    const DoubleWell dw;
    std::vector<double> grid;
    for (int k = 0; k <= 400; ++k)
        grid.push_back(-4.0 + 0.02 * k);
    const Tabulated1D pi = discrete_conjugate(dw.raw_table(4001), grid);
    const TangentSet ts = tangent_set(pi, 0.0);
    CHECK_FALSE(ts.degenerate);
    // Slopes of π are −q, so the interval [−1, 1] appears with both ends.
    CHECK(ts.r_min == doctest::Approx(-1.0).epsilon(2e-3));
    CHECK(ts.r_max == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(ts.supports(pi, 1e-12));
    const std::vector<double> phases = ts.pure_phase_densities();
    REQUIRE(phases.size() == 2);
    CHECK(phases.front() < phases.back());
}

TEST_CASE("q_of_theta refuses a kink")
{
    const DoubleWell dw;
    CHECK_THROWS_AS(q_of_theta(dw.pressure(), ControlVariable{0.0}), Error);
    const StateDensity q = q_of_theta(dw.pressure(), ControlVariable{2.0});
    CHECK(q[0] < -1.0);
}

TEST_CASE("concave envelope flattens the double well")
{
    const DoubleWell dw;
    const Tabulated1D env = concave_envelope_table(dw.raw_table(401));
    CHECK(env(0.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(env(0.5) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(env(1.5) == doctest::Approx(dw.raw(1.5)).epsilon(1e-9));
    for (std::size_t i = 0; i < env.size(); ++i)
        CHECK(env.y[i] >= dw.raw(env.x[i]) - 1e-14);
}

TEST_CASE("biconjugation recovers a concave table")
{
    const Tabulated1D s = Tabulated1D::sample([](double q) { return -q * q; }, -1.0, 1.0, 201);
    std::vector<double> th;
    for (int k = 0; k <= 400; ++k)
        th.push_back(-2.5 + 0.0125 * k);
    const Tabulated1D pi = discrete_conjugate(s, th);
    const Tabulated1D back = discrete_biconjugate(pi, s.x);
    for (std::size_t i = 0; i < s.size(); ++i)
        CHECK(back.y[i] == doctest::Approx(s.y[i]).epsilon(1e-4));
}

TEST_CASE("pressure from reduced pressure")
{
    CHECK(pressure_from_pi(1.5, 2.0) == doctest::Approx(3.0));
}
