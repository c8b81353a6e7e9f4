#include "lte/quantum_stat.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>

namespace lte {

namespace {

bool is_diagonal(const Mat& m)
{
    const Eigen::Index n = m.rows();
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
            if (i != j && m(i, j) != 0.0)
                return false;
    return true;
}

// Weights for generic linear combinations of non-diagonal charges.
constexpr double kMixWeights[] = {1.0, 0.5772156649015329, 0.3183098861837907, 0.2718281828459045};

} // namespace

JointSpectrum diagonalize(const DenseRealization& r)
{
    if (r.charges.empty())
        throw Error(ErrorKind::Input, "diagonalize: realization has no charges");
    const int dim = r.dimension();
    const std::size_t n = r.charges.size();
    std::vector<std::size_t> diag_ids, full_ids;
    for (std::size_t j = 0; j < n; ++j)
        (is_diagonal(r.charges[j]) ? diag_ids : full_ids).push_back(j);

    // Sectors: basis states sharing the eigenvalues of every diagonal charge.
    std::map<std::vector<double>, std::vector<int>> sectors;
    for (int s = 0; s < dim; ++s) {
        std::vector<double> key;
        for (std::size_t j : diag_ids)
            key.push_back(r.charges[j](s, s));
        sectors[key].push_back(s);
    }

    JointSpectrum spec;
    spec.sites = r.sites;
    spec.charges = r.charges;
    spec.vectors = Mat::Zero(dim, dim);
    spec.charge_values = Mat::Zero(dim, static_cast<Eigen::Index>(n));
    int col = 0;
    for (const auto& [key, states] : sectors) {
        const int m = static_cast<int>(states.size());
        Mat block = Mat::Zero(m, m);
        for (std::size_t t = 0; t < full_ids.size(); ++t) {
            const Mat& q = r.charges[full_ids[t]];
            const double w = kMixWeights[t % 4];
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    block(a, b) += w * q(states[a], states[b]);
        }
        Mat local = Mat::Identity(m, m);
        if (!full_ids.empty()) {
            Eigen::SelfAdjointEigenSolver<Mat> es(block);
            local = es.eigenvectors();
        }
        for (int k = 0; k < m; ++k) {
            for (int a = 0; a < m; ++a)
                spec.vectors(states[a], col) = local(a, k);
            for (std::size_t j = 0; j < n; ++j) {
                const Mat& q = r.charges[j];
                double v = 0.0;
                for (int a = 0; a < m; ++a)
                    for (int b = 0; b < m; ++b)
                        v += local(a, k) * q(states[a], states[b]) * local(b, k);
                spec.charge_values(col, static_cast<Eigen::Index>(j)) = v;
            }
            ++col;
        }
    }
    return spec;
}

FiniteGibbsState::FiniteGibbsState(ControlVariable theta, int sites, double log_partition,
    std::variant<DenseGibbs, FreeFermionGibbs> b)
    : theta_(std::move(theta)), sites_(sites), log_z_(log_partition), backend_(std::move(b))
{
}

Mat FiniteGibbsState::density_matrix() const
{
    const DenseGibbs& d = dense();
    const Mat& v = d.spectrum->vectors;
    const Vec p = Vec::Map(d.probabilities.data(), static_cast<Eigen::Index>(d.probabilities.size()));
    return v * p.asDiagonal() * v.transpose();
}

GibbsStateFactory::GibbsStateFactory(const FiniteRealization& r, Exec exec) : exec_(exec)
{
    if (const auto* d = std::get_if<DenseRealization>(&r)) {
        sites_ = d->sites;
        n_ = static_cast<int>(d->charges.size());
        spectrum_ = std::make_shared<const JointSpectrum>(diagonalize(*d));
    } else {
        const auto& ff = std::get<FreeFermionRealization>(r);
        sites_ = ff.sites;
        n_ = 2;
        modes_ = ff.mode_energies();
    }
}

FiniteGibbsState GibbsStateFactory::at(const ControlVariable& theta) const
{
    if (theta.dim() != n_)
        throw Error(ErrorKind::Input, "Gibbs state: control dimension does not match the number of charges");
    if (spectrum_) {
        const Eigen::Index dim = spectrum_->charge_values.rows();
        std::vector<double> logw(static_cast<std::size_t>(dim));
        for (Eigen::Index k = 0; k < dim; ++k)
            logw[static_cast<std::size_t>(k)] = -spectrum_->charge_values.row(k).dot(theta.theta);
        const double log_z = log_sum_exp(logw);
        for (double& w : logw)
            w = std::exp(w - log_z);
        return FiniteGibbsState(theta, sites_, log_z, DenseGibbs{spectrum_, std::move(logw)});
    }
    FreeFermionGibbs g;
    g.mode_energies = modes_;
    g.occupations.resize(modes_.size());
    for (std::size_t k = 0; k < modes_.size(); ++k)
        g.occupations[k] = fermi(theta[0] * modes_[k] + theta[1]);
    const double log_z = kernels::fermion_mode_sums(modes_, theta[0], theta[1], exec_).log_partition;
    return FiniteGibbsState(theta, sites_, log_z, std::move(g));
}

double pi_L(const GibbsStateFactory& f, const ControlVariable& theta)
{
    if (!(theta[0] > 0.0))
        throw Error(ErrorKind::Domain, "pi_L: theta_1 must be positive");
    return f.at(theta).log_partition() / f.sites();
}

double pi_L(const Model& m, const ControlVariable& theta, int sites, Exec exec)
{
    if (!(theta[0] > 0.0))
        throw Error(ErrorKind::Domain, "pi_L: theta_1 must be positive");
    const FiniteRealization r = build_finite_model(m, sites);
    if (const auto* ff = std::get_if<FreeFermionRealization>(&r)) {
        const std::vector<double> modes = ff->mode_energies();
        return kernels::fermion_mode_sums(modes, theta[0], theta[1], exec).log_partition / sites;
    }
    return pi_L(GibbsStateFactory(r, exec), theta);
}

PiConvergenceReport pi_convergence(const Model& m, const ControlVariable& theta, const std::vector<int>& sites)
{
    if (sites.empty() || !std::is_sorted(sites.begin(), sites.end()))
        throw Error(ErrorKind::Input, "pi_convergence: site list must be non-empty and ascending");
    PiConvergenceReport rep;
    rep.sites = sites;
    for (int l : sites)
        rep.values.push_back(pi_L(m, theta, l));
    for (std::size_t k = 1; k < rep.values.size(); ++k)
        rep.increments.push_back(std::abs(rep.values[k] - rep.values[k - 1]));

    if (const auto* ff = std::get_if<FreeFermionChain>(&m)) {
        rep.has_reference = true;
        rep.reference = free_fermion_pi_infinity(*ff, theta);
        for (double v : rep.values)
            rep.deviations.push_back(std::abs(v - rep.reference));
        for (std::size_t k = 1; k < rep.deviations.size(); ++k) {
            const double prev = rep.deviations[k - 1];
            const double cur = rep.deviations[k];
            const bool ok = prev > rep.resolution_floor ? cur < prev : cur <= rep.resolution_floor;
            if (!ok) {
                rep.monotone = false;
                rep.flagged.push_back(static_cast<int>(k));
            }
        }
    } else {
        for (std::size_t k = 1; k < rep.increments.size(); ++k)
            if (!(rep.increments[k] < rep.increments[k - 1] || rep.increments[k] <= rep.resolution_floor)) {
                rep.monotone = false;
                rep.flagged.push_back(static_cast<int>(k + 1));
            }
    }

    // Richardson with the power fitted from the last three points.
    rep.extrapolated = rep.values.back();
    const std::size_t n = rep.values.size();
    if (n >= 3) {
        const double d1 = rep.values[n - 2] - rep.values[n - 3];
        const double d2 = rep.values[n - 1] - rep.values[n - 2];
        const double ratio_l = static_cast<double>(sites[n - 1]) / sites[n - 2];
        if (std::abs(d1) > 1e-15 && std::abs(d2) > 1e-15 && d1 * d2 > 0.0 && std::abs(d1) > std::abs(d2)) {
            rep.fitted_order = std::log(d1 / d2) / std::log(ratio_l);
            rep.extrapolated = rep.values[n - 1] + d2 / (std::pow(ratio_l, rep.fitted_order) - 1.0);
        }
    }
    if (rep.has_reference)
        rep.extrapolation_deviation = std::abs(rep.extrapolated - rep.reference);
    return rep;
}

GibbsMoments gibbs_moments(const FiniteGibbsState& state)
{
    GibbsMoments out;
    const double l = state.sites();
    if (state.is_dense()) {
        const DenseGibbs& d = state.dense();
        const Mat& lam = d.spectrum->charge_values;
        const Eigen::Index n = lam.cols();
        Vec mean = Vec::Zero(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            CompensatedSum acc;
            for (Eigen::Index k = 0; k < lam.rows(); ++k)
                acc.add(d.probabilities[static_cast<std::size_t>(k)] * lam(k, j));
            mean[j] = acc.value();
        }
        Mat cov(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j <= i; ++j) {
                CompensatedSum acc;
                for (Eigen::Index k = 0; k < lam.rows(); ++k)
                    acc.add(d.probabilities[static_cast<std::size_t>(k)] * (lam(k, i) - mean[i]) * (lam(k, j) - mean[j]));
                cov(i, j) = cov(j, i) = acc.value() / l;
            }
        out.density = StateDensity(mean / l);
        out.covariance = cov;
        return out;
    }
    const FreeFermionGibbs& g = state.free_fermion();
    const auto sums = kernels::fermion_mode_sums(g.mode_energies, state.theta()[0], state.theta()[1]);
    out.density = StateDensity{sums.energy / l, sums.number / l};
    out.covariance.resize(2, 2);
    out.covariance << sums.var_energy / l, sums.cov_energy_number / l, sums.cov_energy_number / l, sums.var_number / l;
    return out;
}

double entropy_density_L(const FiniteGibbsState& state)
{
    if (state.is_dense()) {
        CompensatedSum acc;
        for (double p : state.dense().probabilities)
            acc.add(-xlogx(p));
        return acc.value() / state.sites();
    }
    const FreeFermionGibbs& g = state.free_fermion();
    return kernels::fermion_mode_sums(g.mode_energies, state.theta()[0], state.theta()[1]).entropy / state.sites();
}

CVec random_pure_state(int dim, std::uint64_t seed)
{
    const CounterRng rng(seed);
    CVec v(dim);
    for (int k = 0; k < dim; ++k)
        v[k] = {rng.normal(static_cast<std::uint64_t>(k), 0, 0), rng.normal(static_cast<std::uint64_t>(k), 1, 0)};
    return v / v.norm();
}

CMat random_hermitian(int dim, std::uint64_t seed)
{
    const CounterRng rng(seed);
    CMat g(dim, dim);
    std::uint64_t k = 0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j, ++k)
            g(i, j) = {rng.normal(k, 0, 0), rng.normal(k, 1, 0)};
    CMat h = 0.5 * (g + g.adjoint());
    return h / h.cwiseAbs().maxCoeff();
}

Mat pi_L_hessian_fd(const GibbsStateFactory& f, const ControlVariable& theta, double step)
{
    return fd_hessian_richardson([&](const Vec& t) { return f.at(ControlVariable(t)).log_partition() / f.sites(); },
        theta.theta, step);
}

double gts_functional(const JointSpectrum& spec, const ControlVariable& theta, const CMat& rho)
{
    Eigen::SelfAdjointEigenSolver<CMat> es(rho, Eigen::EigenvaluesOnly);
    CompensatedSum ent;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
        ent.add(-xlogx(std::max(0.0, es.eigenvalues()[k])));
    double energy_term = 0.0;
    for (std::size_t j = 0; j < spec.charges.size(); ++j)
        energy_term += theta[static_cast<int>(j)] * (rho.real().cwiseProduct(spec.charges[j])).sum();
    return (ent.value() - energy_term) / spec.sites;
}

GtsReport gts_variational_check(const GibbsStateFactory& f, const ControlVariable& theta,
    const std::vector<Perturbation>& perturbations)
{
    if (!f.dense())
        throw Error(ErrorKind::Unsupported, "gts_variational_check needs the dense backend");
    const FiniteGibbsState g = f.at(theta);
    const CMat rho = g.density_matrix().cast<std::complex<double>>();
    GtsReport rep;
    rep.pi_L = g.log_partition() / g.sites();
    for (const Perturbation& p : perturbations) {
        if (p.lambda < 0.0 || p.lambda > 1.0)
            throw Error(ErrorKind::Input, "gts_variational_check: lambda must lie in [0, 1]");
        CMat sigma = rho;
        if (p.direction.size() != 0) {
            if (p.direction.size() != rho.rows())
                throw Error(ErrorKind::Input, "gts_variational_check: perturbation has the wrong dimension");
            const CVec psi = p.direction / p.direction.norm();
            sigma = psi * psi.adjoint();
        }
        const CMat mixed = (1.0 - p.lambda) * rho + p.lambda * sigma;
        GtsEntry e;
        e.lambda = p.lambda;
        e.functional = gts_functional(f.spectrum(), theta, mixed);
        e.gap = rep.pi_L - e.functional;
        if (e.gap < -1e-12)
            rep.holds = false;
        rep.entries.push_back(e);
    }
    return rep;
}

Mat build_effective_hamiltonian(const DenseRealization& r, const ControlVariable& theta)
{
    if (!(theta[0] > 0.0))
        throw Error(ErrorKind::Domain, "effective Hamiltonian needs theta_1 > 0");
    if (theta.dim() != static_cast<int>(r.charges.size()))
        throw Error(ErrorKind::Input, "effective Hamiltonian: control dimension mismatch");
    Mat h = Mat::Zero(r.dimension(), r.dimension());
    for (std::size_t j = 0; j < r.charges.size(); ++j)
        h += theta[static_cast<int>(j)] * r.charges[j];
    return h / theta[0];
}

Mat build_effective_hamiltonian(const FreeFermionRealization& r, const ControlVariable& theta)
{
    if (!(theta[0] > 0.0))
        throw Error(ErrorKind::Domain, "effective Hamiltonian needs theta_1 > 0");
    return r.single_particle + (theta[1] / theta[0]) * Mat::Identity(r.sites, r.sites);
}

KMSCheckReport kms_check(const CMat& hamiltonian, double beta, const NamedOperator& a, const NamedOperator& b,
    const std::vector<double>& taus)
{
    const Eigen::Index dim = hamiltonian.rows();
    if (dim == 0 || hamiltonian.cols() != dim)
        throw Error(ErrorKind::Input, "kms_check: Hamiltonian must be square");
    if (dim > 64)
        throw Error(ErrorKind::Input, "kms_check: dimension above 64");
    const double scale = 1.0 + max_abs(hamiltonian.cwiseAbs());
    if ((hamiltonian - hamiltonian.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw Error(ErrorKind::Input, "kms_check: Hamiltonian is not Hermitian");
    if (!(beta > 0.0))
        throw Error(ErrorKind::Input, "kms_check: beta must be positive");
    if (a.op.rows() != dim || b.op.rows() != dim || a.op.cols() != dim || b.op.cols() != dim)
        throw Error(ErrorKind::Input, "kms_check: observable dimensions do not match H");

    Eigen::SelfAdjointEigenSolver<CMat> es(hamiltonian);
    const Vec energies = es.eigenvalues();
    const CMat& u = es.eigenvectors();
    const CMat at = u.adjoint() * a.op * u;
    const CMat bt = u.adjoint() * b.op * u;

    std::vector<double> logw(static_cast<std::size_t>(dim));
    for (Eigen::Index m = 0; m < dim; ++m)
        logw[static_cast<std::size_t>(m)] = -beta * energies[m];
    const double log_z = log_sum_exp(logw);
    Vec p(dim);
    for (Eigen::Index m = 0; m < dim; ++m)
        p[m] = std::exp(logw[static_cast<std::size_t>(m)] - log_z);

    // α_z(A)_{mn} = e^{iz(E_m − E_n)} A_{mn} in the eigenbasis.
    auto evolve = [&](std::complex<double> z) {
        CMat out(dim, dim);
        for (Eigen::Index n = 0; n < dim; ++n)
            for (Eigen::Index m = 0; m < dim; ++m)
                out(m, n) = std::exp(std::complex<double>(0.0, 1.0) * z * (energies[m] - energies[n])) * at(m, n);
        return out;
    };

    KMSCheckReport rep;
    rep.beta = beta;
    for (double tau : taus) {
        const CMat a_tau = evolve({tau, 0.0});
        const CMat a_shift = evolve({tau, beta});
        KmsEntry e;
        e.a_label = a.label;
        e.b_label = b.label;
        e.tau = tau;
        e.lhs = (p.asDiagonal() * (a_tau * bt)).trace();
        e.rhs = (p.asDiagonal() * (bt * a_shift)).trace();
        e.residual = std::abs(e.lhs - e.rhs);
        rep.max_residual = std::max(rep.max_residual, e.residual);
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

std::string_view to_string(Verdict v) noexcept
{
    switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
    case Verdict::Vacuous: return "vacuous";
    }
    return "unknown";
}

namespace {

/// Root of a monotone scalar function on [lo, hi]; nullopt when not bracketed.
std::optional<double> bracketed_root(const std::function<double(double)>& f, double lo, double hi)
{
    const double flo = f(lo);
    const double fhi = f(hi);
    if (!(flo * fhi < 0.0))
        return std::nullopt;
    boost::uintmax_t iters = 200;
    auto tol = boost::math::tools::eps_tolerance<double>(50);
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
    return 0.5 * (r.first + r.second);
}

} // namespace

CompletenessReport completeness_check(const FreeFermionChain& m, const std::vector<ControlVariable>& grid)
{
    if (grid.empty())
        throw Error(ErrorKind::Input, "completeness_check: empty control grid");
    CompletenessReport rep;
    rep.min_hessian_eigenvalue = std::numeric_limits<double>::infinity();
    for (const ControlVariable& t : grid) {
        Eigen::SelfAdjointEigenSolver<Mat> es(m.susceptibility(t));
        rep.min_hessian_eigenvalue = std::min(rep.min_hessian_eigenvalue, es.eigenvalues().minCoeff());
    }
    rep.injectivity = rep.min_hessian_eigenvalue > 0.0 ? Verdict::Pass : Verdict::Fail;

    const ControlVariable base = grid.front();
    const StateDensity qa = m.density(base);
    int found = 0;

    // Same particle density, different energy: {n} alone does not separate.
    {
        const double t1 = 2.0 * base[0];
        auto f = [&](double t2) { return m.density(ControlVariable{t1, t2})[1] - qa[1]; };
        std::optional<double> t2 = std::abs(f(base[1])) < 1e-13 ? std::optional<double>(base[1]) : bracketed_root(f, -50.0, 50.0);
        if (t2) {
            const ControlVariable tb{t1, *t2};
            const StateDensity qb = m.density(tb);
            if (std::abs(qb[0] - qa[0]) > 1e-6) {
                rep.witnesses.push_back({"particle density", base, tb, qa, qb});
                ++found;
            }
        }
    }
    // Same energy density, different particle density: {e} alone does not separate.
    {
        const double t2 = base[1] + 0.5;
        auto f = [&](double t1) { return m.density(ControlVariable{t1, t2})[0] - qa[0]; };
        std::optional<double> t1 = bracketed_root(f, 1e-3, 100.0);
        if (t1) {
            const ControlVariable tb{*t1, t2};
            const StateDensity qb = m.density(tb);
            if (std::abs(qb[1] - qa[1]) > 1e-6) {
                rep.witnesses.push_back({"energy density", base, tb, qa, qb});
                ++found;
            }
        }
    }
    rep.minimality = found == 2 ? Verdict::Pass : Verdict::Inconclusive;
    return rep;
}

CompletenessReport completeness_check(const Paramagnet& m, const std::vector<ControlVariable>& grid)
{
    if (grid.empty())
        throw Error(ErrorKind::Input, "completeness_check: empty control grid");
    const ReducedPressure pi = m.pressure();
    CompletenessReport rep;
    rep.min_hessian_eigenvalue = std::numeric_limits<double>::infinity();
    for (const ControlVariable& t : grid)
        rep.min_hessian_eigenvalue = std::min(rep.min_hessian_eigenvalue, pi.hessian(t)(0, 0));
    rep.injectivity = rep.min_hessian_eigenvalue > 0.0 ? Verdict::Pass : Verdict::Fail;
    rep.minimality = Verdict::Vacuous;
    return rep;
}

Mat LocalGibbsProfile::generator() const
{
    if (sites < 3)
        throw Error(ErrorKind::Input, "local Gibbs profile needs at least 3 sites");
    Mat a = Mat::Zero(sites, sites);
    std::vector<ControlVariable> th;
    th.reserve(static_cast<std::size_t>(sites));
    for (int i = 0; i < sites; ++i) {
        th.push_back(theta(static_cast<double>(i) / sites));
        if (th.back().dim() != 2)
            throw Error(ErrorKind::Input, "local Gibbs profile: control must be (theta_1, theta_2)");
    }
    for (int i = 0; i < sites; ++i) {
        a(i, i) = th[static_cast<std::size_t>(i)][1];
        if (i + 1 < sites) {
            const double bond = 0.5 * (th[static_cast<std::size_t>(i)][0] + th[static_cast<std::size_t>(i + 1)][0]);
            a(i, i + 1) = a(i + 1, i) = -hopping * bond;
        }
    }
    return a;
}

RestrictionReport local_restriction_check(const LocalGibbsProfile& profile, int window, const std::vector<double>& centers)
{
    const int l = profile.sites;
    if (window < 1 || window % 2 == 0)
        throw Error(ErrorKind::Input, "local_restriction_check: window must be a positive odd number of sites");
    if (10 * window > l)
        throw Error(ErrorKind::Input, "local_restriction_check: window/L ratio too large (need window <= L/10)");

    const Mat a = profile.generator();
    Eigen::SelfAdjointEigenSolver<Mat> es(a);
    const Mat& v = es.eigenvectors();
    Vec f(l);
    for (int k = 0; k < l; ++k)
        f[k] = fermi(es.eigenvalues()[k]);
    auto corr = [&](int i, int j) { return (v.row(i).cwiseProduct(v.row(j))).dot(f); };

    const FreeFermionChain bulk{profile.hopping};
    const int half = window / 2;
    RestrictionReport rep;
    rep.sites = l;
    rep.window = window;
    for (double x : centers) {
        const int c = static_cast<int>(std::lround(x * l));
        if (c - half < 0 || c + half + 1 >= l)
            throw Error(ErrorKind::Input, "local_restriction_check: window around x = " + std::to_string(x)
                    + " leaves the chain");
        CompensatedSum dens, en;
        for (int i = c - half; i <= c + half; ++i) {
            dens.add(corr(i, i));
            en.add(-2.0 * profile.hopping * corr(i, i + 1));
        }
        RestrictionEntry e;
        e.x = x;
        e.center_site = c;
        e.density = dens.value() / window;
        e.energy = en.value() / window;
        const StateDensity ref = bulk.density(profile.theta(static_cast<double>(c) / l));
        e.reference_energy = ref[0];
        e.reference_density = ref[1];
        e.density_deviation = std::abs(e.density - e.reference_density);
        e.energy_deviation = std::abs(e.energy - e.reference_energy);
        rep.entries.push_back(e);
    }
    return rep;
}

} // namespace lte
