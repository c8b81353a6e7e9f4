#include "lte/quantum_stat.hpp"

#include <doctest.h>

#include <cmath>

using namespace lte;

TEST_CASE("π_8 for free fermions at θ = (1, 0)")
{
    // Eight-mode sum (1/8) Σ ln(1 + e^{2cos(2πk/8)}), evaluated to 40 digits.
    CHECK(std::abs(pi_L(FreeFermionChain{}, ControlVariable{1.0, 0.0}, 8) - 0.917383049284875) < 1e-12);
}

TEST_CASE("paramagnet π_L is volume independent")
{
    const double exact = std::log(2.0 * std::cosh(0.6));
    for (int l : {2, 5, 8})
        CHECK(pi_L(Paramagnet{}, ControlVariable{0.6}, l) == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("dense and mode-sum backends agree")
{
    const ControlVariable t{0.8, -0.3};
    const GibbsStateFactory dense(build_dense_fermion_chain(FreeFermionChain{}, 6));
    const GibbsStateFactory fast(build_finite_model(FreeFermionChain{}, 6));
    CHECK(dense.dense());
    CHECK_FALSE(fast.dense());
    CHECK(pi_L(dense, t) == doctest::Approx(pi_L(fast, t)).epsilon(1e-12));
    const GibbsMoments a = gibbs_moments(dense.at(t));
    const GibbsMoments b = gibbs_moments(fast.at(t));
    CHECK(max_abs(a.density.q - b.density.q) < 1e-12);
    CHECK(max_abs(a.covariance - b.covariance) < 1e-11);
    CHECK(entropy_density_L(dense.at(t)) == doctest::Approx(entropy_density_L(fast.at(t))).epsilon(1e-12));
}

TEST_CASE("dense Gibbs state is a density matrix")
{
    const GibbsStateFactory f(build_finite_model(SpinChainED{6, 1.0, 0.4, 0.1}, 6));
    const Mat rho = f.at(ControlVariable{1.2, 0.3}).density_matrix();
    CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(max_abs(rho - rho.transpose()) < 1e-15);
    Eigen::SelfAdjointEigenSolver<Mat> es(rho);
    CHECK(es.eigenvalues().minCoeff() > -1e-15);
}

TEST_CASE("moment-Hessian duality at finite volume")
{
    const GibbsStateFactory f(build_finite_model(SpinChainED{8, 1.0, 0.5, 0.0}, 8));
    const ControlVariable t{0.7, 0.2};
    const Mat cov = gibbs_moments(f.at(t)).covariance;
    CHECK(max_abs(cov - pi_L_hessian_fd(f, t)) < 1e-8);
}

TEST_CASE("infinite-temperature number variance")
{
    const GibbsStateFactory f(build_finite_model(FreeFermionChain{}, 64));
    const Mat cov = gibbs_moments(f.at(ControlVariable{kZeroPlus, 0.0})).covariance;
    CHECK(cov(1, 1) == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("π_L convergence report")
{
    const PiConvergenceReport r = pi_convergence(FreeFermionChain{}, ControlVariable{1.0, 0.0}, {8, 16, 32, 64});
    CHECK(r.has_reference);
    CHECK(r.monotone);
    CHECK(r.deviations.back() < 1e-13);
    CHECK(r.deviations.front() > r.deviations[1]);
}

TEST_CASE("GTS: the Gibbs state maximises the functional")
{
    const GibbsStateFactory f(build_finite_model(SpinChainED{4, 1.0, 0.3, 0.0}, 4));
    const ControlVariable t{1.0, 0.0};
    std::vector<Perturbation> ps;
    for (double lam : {0.0, 0.1, 0.5, 1.0})
        ps.push_back({lam, random_pure_state(16, 3)});
    const GtsReport g = gts_variational_check(f, t, ps);
    CHECK(g.holds);
    CHECK(std::abs(g.entries.front().gap) < 1e-12);
    for (std::size_t k = 1; k < g.entries.size(); ++k)
        CHECK(g.entries[k].gap > 0.0);
}

TEST_CASE("KMS: hand-computed two-level case")
{
    CMat h = CMat::Zero(2, 2);
    h(1, 1) = 1.0;
    CMat sx = CMat::Zero(2, 2);
    sx(0, 1) = sx(1, 0) = 1.0;
    const KMSCheckReport k = kms_check(h, 0.9, {"sx", sx}, {"sx", sx}, {0.0});
    REQUIRE(k.entries.size() == 1);
    CHECK(std::abs(k.entries[0].lhs - 1.0) < 1e-14);
    CHECK(std::abs(k.entries[0].rhs - 1.0) < 1e-14);
}

TEST_CASE("KMS: random Hermitian instances")
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const CMat h = random_hermitian(8, seed);
        const KMSCheckReport k = kms_check(h, 1.3, {"A", random_hermitian(8, seed + 100)},
            {"B", random_hermitian(8, seed + 200)}, {0.0, 0.5, 2.0});
        CHECK(k.max_residual < 1e-10);
    }
}

TEST_CASE("random states")
{
    const CVec psi = random_pure_state(10, 7);
    CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-14));
    const CMat a = random_hermitian(5, 7);
    CHECK((a - a.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.cwiseAbs().maxCoeff() == doctest::Approx(1.0));
    CHECK((random_hermitian(5, 7) - a).norm() == 0.0);
}

TEST_CASE("completeness of the free-fermion ring")
{
    std::vector<ControlVariable> grid;
    for (double t1 : {0.5, 1.5})
        for (double t2 : {-0.5, 0.5})
            grid.push_back(ControlVariable{t1, t2});
    const CompletenessReport r = completeness_check(FreeFermionChain{}, grid);
    CHECK(r.injectivity == Verdict::Pass);
    CHECK(r.min_hessian_eigenvalue > 0.0);
}

TEST_CASE("local restriction: constant profile is exact")
{
    LocalGibbsProfile p;
    p.theta = [](double) { return ControlVariable{1.0, 0.0}; };
    p.sites = 200;
    const RestrictionReport r = local_restriction_check(p, 11, {0.5});
    REQUIRE(r.entries.size() == 1);
    CHECK(r.entries[0].energy_deviation < 1e-10);
    CHECK(r.entries[0].density_deviation < 1e-10);
}
