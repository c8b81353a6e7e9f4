#include "lte/fluctuations.hpp"

#include <doctest.h>

#include <cmath>

using namespace lte;

namespace {

const Paramagnet kPm;

CovarianceField uniform_cov(int cells, double theta)
{
    const CellGrid g{cells, 1.0};
    return CovarianceField(uniform_field(g, Vec::Constant(1, theta)), [](const Vec& t) { return kPm.pressure().hessian(ControlVariable(t)); });
}

CovarianceField linear_cov(int cells)
{
    const CellGrid g{cells, 1.0};
    ControlField f{g, Mat(1, cells)};
    for (int i = 0; i < cells; ++i)
        f.theta(0, i) = 0.5 + g.center(i);
    return CovarianceField(f, [](const Vec& t) { return kPm.pressure().hessian(ControlVariable(t)); });
}

} // namespace

TEST_CASE("bump norm")
{
    const TestFunction f{0.5, 0.2, Vec::Constant(1, 3.0)};
    CHECK(f.norm_squared() == doctest::Approx(256.0 / 315.0 * 0.2 * 9.0));
    CHECK(f(0.5)[0] == doctest::Approx(3.0));
    CHECK(f(0.75)[0] == 0.0);
    const Smearing s = discretize(f, CellGrid{2000, 1.0});
    CHECK(s.norm_squared() == doctest::Approx(f.norm_squared()).epsilon(1e-6));
}

TEST_CASE("scaled bump keeps its L2 norm")
{
    const TestFunction f{0.5, 0.2};
    const CellGrid g{4000, 1.0};
    for (double eps : {1.0, 0.5, 0.1})
        CHECK(discretize(ScaledTestFunction{f, 0.5, eps}, g).norm_squared() == doctest::Approx(f.norm_squared()).epsilon(1e-5));
}

TEST_CASE("support must stay inside the grid")
{
    CHECK_THROWS_AS(discretize(TestFunction{0.1, 0.3}, CellGrid{100, 1.0}), Error);
}

TEST_CASE("smeared draws agree with full-field samples")
{
    const CovarianceField cov = linear_cov(200);
    const Smearing sm = discretize(TestFunction{0.4, 0.2}, cov.grid());
    const CounterRng rng(5);
    const std::vector<double> fast = smeared_draws(cov, sm, rng, 20);
    for (std::uint64_t k = 0; k < 20; ++k)
        CHECK(smear(sample_field(cov, rng, k), sm) == doctest::Approx(fast[k]).epsilon(1e-12));
}

TEST_CASE("serial and parallel draws are bit identical")
{
    const CovarianceField cov = linear_cov(300);
    const Smearing sm = discretize(TestFunction{0.5, 0.25}, cov.grid());
    const CounterRng rng(17);
    CHECK(smeared_draws(cov, sm, rng, 3000, Exec::Serial) == smeared_draws(cov, sm, rng, 3000, Exec::Parallel));
}

TEST_CASE("uniform variance matches (256/315)·r·π''")
{
    const CovarianceField cov = uniform_cov(500, 1.0);
    const TestFunction f{0.5, 0.2};
    const Smearing sm = discretize(f, cov.grid());
    const double chi = kPm.pressure().hessian(ControlVariable{1.0})(0, 0);
    CHECK(smeared_variance(cov, sm) == doctest::Approx(chi * f.norm_squared()).epsilon(1e-5));
    const std::size_t n = 20000;
    const SampleMoments m = sample_moments(smeared_draws(cov, sm, CounterRng(3), n));
    CHECK(std::abs(m.variance - smeared_variance(cov, sm)) < 3.0 * m.variance_standard_error());
}

TEST_CASE("characteristic function of a Gaussian")
{
    CHECK(gaussian_prediction(0.5) == doctest::Approx(std::exp(-0.25)));
    const CovarianceField cov = uniform_cov(400, 0.8);
    const Smearing sm = discretize(TestFunction{0.5, 0.2}, cov.grid());
    const std::size_t n = 40000;
    const auto est = characteristic_estimate(smeared_draws(cov, sm, CounterRng(9), n));
    CHECK(std::abs(est - gaussian_prediction(smeared_variance(cov, sm))) < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("punctual bias shrinks with ε on a linear profile")
{
    const CovarianceField cov = linear_cov(2000);
    const PunctualReport r = punctual_covariance_check(cov, TestFunction{0.0, 1.0}, 0.5, {0.2, 0.1, 0.05}, 5000, CounterRng(1));
    CHECK(r.entries.size() == 3);
    CHECK(std::abs(r.entries.back().bias) < std::abs(r.entries.front().bias));
    if (std::isfinite(r.bias_slope))
        CHECK(r.bias_slope > 1.0);
    CHECK(r.passed);
}

TEST_CASE("punctual check rejects ε below ten cells")
{
    const CovarianceField cov = linear_cov(64);
    CHECK_THROWS_AS(punctual_covariance_check(cov, TestFunction{0.0, 1.0}, 0.5, {0.1}, 1000, CounterRng(1)), Error);
}

TEST_CASE("ε-invariance for uniform fields")
{
    const CovarianceField cov = uniform_cov(2000, 1.0);
    const ScalingReport r = scaling_invariance_check(cov, TestFunction{0.0, 1.0}, 0.5, {0.4, 0.2, 0.1}, 5000, CounterRng(4));
    CHECK(r.passed);
    CHECK(r.max_norm_spread < 1e-4);
}

TEST_CASE("phase boundary is reported")
{
    const CellGrid g{8, 1.0};
    CHECK_THROWS_AS(CovarianceField(uniform_field(g, Vec::Constant(1, 1.0)), [](const Vec&) { return Mat::Constant(1, 1, -1.0); }),
        Error);
}
