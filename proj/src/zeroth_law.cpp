#include "lte/zeroth_law.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace lte {

namespace {

using cd = std::complex<double>;

double hermitian_defect(const CMat& m) { return m.size() ? (m - m.adjoint()).cwiseAbs().maxCoeff() : 0.0; }

CMat vec_to_mat(const CVec& v, int d) { return Eigen::Map<const CMat>(v.data(), d, d); }

CVec mat_to_vec(const CMat& m) { return Eigen::Map<const CVec>(m.data(), m.size()); }

} // namespace

void ProbeSystem::validate() const
{
    const Eigen::Index d = hamiltonian.rows();
    if (d < 2 || d > 8 || hamiltonian.cols() != d)
        throw Error(ErrorKind::Input, "probe Hamiltonian must be square with dimension 2..8");
    const double scale = 1.0 + hamiltonian.cwiseAbs().maxCoeff();
    if (hermitian_defect(hamiltonian) > 1e-12 * scale)
        throw Error(ErrorKind::Input, "probe Hamiltonian is not Hermitian");
    if (coupling.empty())
        throw Error(ErrorKind::Input, "probe has no coupling operators");
    for (const CMat& a : coupling) {
        if (a.rows() != d || a.cols() != d)
            throw Error(ErrorKind::Input, "coupling operator dimension mismatch");
        if (hermitian_defect(a) > 1e-12 * (1.0 + a.cwiseAbs().maxCoeff()))
            throw Error(ErrorKind::Input, "coupling operator is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<CMat> es(hamiltonian, Eigen::EigenvaluesOnly);
    const Vec e = es.eigenvalues();
    for (Eigen::Index k = 1; k < e.size(); ++k)
        if (e[k] - e[k - 1] < 1e-9 * scale)
            throw Error(ErrorKind::Unsupported, "degenerate probe spectrum is not supported");
}

ProbeSystem qubit_probe(double omega0)
{
    ProbeSystem p;
    p.hamiltonian = CMat::Zero(2, 2);
    p.hamiltonian(1, 1) = omega0;
    CMat sx = CMat::Zero(2, 2);
    sx(0, 1) = sx(1, 0) = 1.0;
    p.coupling.push_back(sx);
    return p;
}

ProbeSystem random_probe(int dim, std::uint64_t seed)
{
    const CounterRng rng(seed);
    auto herm = [&](std::uint64_t stream) {
        CMat m(dim, dim);
        std::uint64_t k = 0;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j, ++k)
                m(i, j) = cd(rng.normal(stream, k, 0), rng.normal(stream, k, 1));
        return CMat(0.5 * (m + m.adjoint()));
    };
    ProbeSystem p;
    p.hamiltonian = herm(1);
    p.coupling.push_back(herm(2));
    return p;
}

RateProfile flat_rate(double gamma0)
{
    if (!(gamma0 > 0.0))
        throw Error(ErrorKind::Input, "base rate must be positive");
    return [gamma0](double) { return gamma0; };
}

CMat ThermalGenerator::apply(const CMat& rho) const
{
    return vec_to_mat(liouvillian * mat_to_vec(rho), dim());
}

CMat ThermalGenerator::gibbs() const
{
    const double e0 = energies.minCoeff();
    Vec w = (-beta * (energies.array() - e0)).exp();
    w /= w.sum();
    return eigenvectors * w.cast<cd>().asDiagonal() * eigenvectors.adjoint();
}

ThermalGenerator build_davies_generator(const ProbeSystem& probe, double beta, const RateProfile& rates)
{
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw Error(ErrorKind::Input, "Davies generator needs finite beta > 0");
    probe.validate();
    ThermalGenerator g;
    g.beta = beta;
    g.hamiltonian = probe.hamiltonian;
    Eigen::SelfAdjointEigenSolver<CMat> es(probe.hamiltonian);
    g.energies = es.eigenvalues();
    g.eigenvectors = es.eigenvectors();
    const int d = probe.dim();
    const double tol = 1e-9 * (1.0 + g.energies.cwiseAbs().maxCoeff());

    // Distinct Bohr frequencies.
    std::vector<double> omegas;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            const double w = g.energies[b] - g.energies[a];
            if (std::none_of(omegas.begin(), omegas.end(), [&](double o) { return std::abs(o - w) < tol; }))
                omegas.push_back(w);
        }
    std::sort(omegas.begin(), omegas.end());

    const CMat& u = g.eigenvectors;
    for (std::size_t k = 0; k < probe.coupling.size(); ++k) {
        const CMat ae = u.adjoint() * probe.coupling[k] * u;
        for (double w : omegas) {
            CMat op = CMat::Zero(d, d);
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    if (std::abs(g.energies[b] - g.energies[a] - w) < tol)
                        op(a, b) = ae(a, b);
            if (op.cwiseAbs().maxCoeff() == 0.0)
                continue;
            JumpOperator j;
            j.coupling = static_cast<int>(k);
            j.omega = w;
            const double base = rates(std::abs(w));
            if (!(base >= 0.0))
                throw Error(ErrorKind::Input, "rate profile must be non-negative");
            j.rate = w >= 0.0 ? base : std::exp(beta * w) * base;
            j.op = u * op * u.adjoint();
            g.jumps.push_back(std::move(j));
        }
    }

    const CMat id = CMat::Identity(d, d);
    const CMat& h = g.hamiltonian;
    CMat l = -cd(0.0, 1.0) * (Eigen::kroneckerProduct(id, h) - Eigen::kroneckerProduct(h.transpose(), id)).eval();
    for (const JumpOperator& j : g.jumps) {
        const CMat ada = j.op.adjoint() * j.op;
        l += j.rate
            * (Eigen::kroneckerProduct(j.op.conjugate(), j.op) - 0.5 * Eigen::kroneckerProduct(id, ada)
                - 0.5 * Eigen::kroneckerProduct(ada.transpose(), id))
                  .eval();
    }
    g.liouvillian = std::move(l);
    return g;
}

double detailed_balance_residual(const ThermalGenerator& g)
{
    double worst = 0.0;
    for (const JumpOperator& up : g.jumps)
        for (const JumpOperator& down : g.jumps)
            if (up.coupling == down.coupling && up.omega > 0.0
                && std::abs(down.omega + up.omega) < 1e-9 * (1.0 + std::abs(up.omega)))
                worst = std::max(worst, std::abs(down.rate - std::exp(-g.beta * up.omega) * up.rate));
    return worst;
}

namespace {

void check_density(const CMat& rho, int d, const char* what)
{
    if (rho.rows() != d || rho.cols() != d)
        throw Error(ErrorKind::Input, std::string(what) + ": density matrix dimension mismatch");
    if (hermitian_defect(rho) > 1e-12)
        throw Error(ErrorKind::Input, std::string(what) + ": density matrix is not Hermitian");
    if (std::abs(rho.trace() - cd(1.0, 0.0)) > 1e-12)
        throw Error(ErrorKind::Input, std::string(what) + ": density matrix does not have unit trace");
    Eigen::SelfAdjointEigenSolver<CMat> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw Error(ErrorKind::Input, std::string(what) + ": density matrix is not positive");
}

void check_evolved(const CMat& rho)
{
    if (std::abs(rho.trace() - cd(1.0, 0.0)) > 1e-12 || hermitian_defect(rho) > 1e-12)
        throw Error(ErrorKind::Integrator, "evolution lost trace or Hermiticity");
    Eigen::SelfAdjointEigenSolver<CMat> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw Error(ErrorKind::Integrator, "evolution produced a negative eigenvalue below -1e-10");
}

} // namespace

CMat evolve(const ThermalGenerator& g, const CMat& rho0, double tau)
{
    check_density(rho0, g.dim(), "evolve");
    if (!(tau >= 0.0))
        throw Error(ErrorKind::Input, "evolve: tau must be non-negative");
    if (tau == 0.0)
        return rho0;
    const CMat prop = (tau * g.liouvillian).exp();
    CMat rho = vec_to_mat(prop * mat_to_vec(rho0), g.dim());
    check_evolved(rho);
    return rho;
}

CMat stationary_state(const ThermalGenerator& g)
{
    const int d = g.dim();
    CMat a = g.liouvillian;
    // Replace the first equation by the trace condition.
    a.row(0).setZero();
    for (int i = 0; i < d; ++i)
        a(0, i * d + i) = 1.0;
    CVec rhs = CVec::Zero(d * d);
    rhs[0] = 1.0;
    const CVec v = a.fullPivLu().solve(rhs);
    CMat rho = vec_to_mat(v, d);
    return 0.5 * (rho + rho.adjoint());
}

double trace_distance(const CMat& a, const CMat& b)
{
    const CMat diff = a - b;
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

Vec populations(const ThermalGenerator& g, const CMat& rho)
{
    const CMat r = g.eigenvectors.adjoint() * rho * g.eigenvectors;
    return r.diagonal().real();
}

double fit_beta(const Vec& energies, const Vec& pops)
{
    if (energies.size() != pops.size() || energies.size() < 2)
        throw Error(ErrorKind::Input, "fit_beta needs matching energies and populations");
    const Eigen::Index n = energies.size();
    Mat a(n, 2);
    Vec y(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        if (!(pops[k] > 0.0))
            throw Error(ErrorKind::Domain, "fit_beta needs strictly positive populations");
        a(k, 0) = -energies[k];
        a(k, 1) = 1.0;
        y[k] = std::log(pops[k]);
    }
    return a.colPivHouseholderQr().solve(y)[0];
}

ThermalizationReport thermalization_check(const ThermalGenerator& g, const CMat& rho0, double tau_max, int points,
    double tolerance)
{
    check_density(rho0, g.dim(), "thermalization_check");
    if (!(tau_max > 0.0) || points < 2)
        throw Error(ErrorKind::Input, "thermalization_check needs tau_max > 0 and at least two grid points");
    ThermalizationReport rep;
    rep.beta = g.beta;
    const CMat target = g.gibbs();
    const double dt = tau_max / (points - 1);
    const CMat step = (dt * g.liouvillian).exp();
    CVec v = mat_to_vec(rho0);
    for (int k = 0; k < points; ++k) {
        if (k > 0)
            v = step * v;
        const CMat rho = vec_to_mat(v, g.dim());
        check_evolved(rho);
        rep.taus.push_back(k * dt);
        rep.distances.push_back(trace_distance(rho, target));
        if (k > 0 && rep.distances[k] > rep.distances[k - 1] + 1e-12)
            rep.contractive = false;
    }
    rep.final_distance = rep.distances.back();

    std::vector<double> tx, ty;
    for (std::size_t k = 0; k < rep.taus.size(); ++k)
        if (rep.distances[k] > 1e-10) {
            tx.push_back(rep.taus[k]);
            ty.push_back(std::log(rep.distances[k]));
        }
    if (tx.size() >= 2) {
        const double mx = compensated_sum(tx) / static_cast<double>(tx.size());
        const double my = compensated_sum(ty) / static_cast<double>(ty.size());
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t k = 0; k < tx.size(); ++k) {
            sxy += (tx[k] - mx) * (ty[k] - my);
            sxx += (tx[k] - mx) * (tx[k] - mx);
        }
        rep.decay_rate = -sxy / sxx;
    }

    Eigen::ComplexEigenSolver<CMat> ces(g.liouvillian, false);
    rep.spectral_gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < ces.eigenvalues().size(); ++k) {
        const double re = -ces.eigenvalues()[k].real();
        if (re > 1e-10)
            rep.spectral_gap = std::min(rep.spectral_gap, re);
    }
    const CMat final_rho = vec_to_mat(v, g.dim());
    rep.final_populations = populations(g, final_rho);
    try {
        rep.fitted_beta = fit_beta(g.energies, rep.final_populations);
    } catch (const Error&) {
        rep.fitted_beta = std::numeric_limits<double>::quiet_NaN();
    }
    rep.passed = rep.contractive && rep.final_distance < tolerance;
    return rep;
}

Vec interpolate_theta(const HydroState& st, const HydroScenario& sc, double x)
{
    if (!(x >= 0.0 && x <= sc.length))
        throw Error(ErrorKind::Input, "probe position outside the hydro domain");
    const int m = st.cells();
    const double u = x / sc.spacing() - 0.5;
    if (u <= 0.0)
        return st.theta.col(0);
    if (u >= m - 1)
        return st.theta.col(m - 1);
    const int i = static_cast<int>(std::floor(u));
    const double w = u - i;
    return (1.0 - w) * st.theta.col(i) + w * st.theta.col(i + 1);
}

Vec interpolate_theta(const Trajectory& tr, const HydroScenario& sc, double x, double t)
{
    if (tr.states.empty())
        throw Error(ErrorKind::Input, "empty trajectory");
    const double t0 = tr.states.front().t;
    const double t1 = tr.states.back().t;
    if (!(t >= t0 - 1e-12 && t <= t1 + 1e-12))
        throw Error(ErrorKind::Input, "probe time outside the trajectory coverage");
    for (std::size_t k = 0; k + 1 < tr.states.size(); ++k) {
        const HydroState& a = tr.states[k];
        const HydroState& b = tr.states[k + 1];
        if (t <= b.t + 1e-12) {
            const double span = b.t - a.t;
            const double w = span > 0.0 ? std::clamp((t - a.t) / span, 0.0, 1.0) : 1.0;
            if (w == 0.0)
                return interpolate_theta(a, sc, x);
            if (w == 1.0)
                return interpolate_theta(b, sc, x);
            return (1.0 - w) * interpolate_theta(a, sc, x) + w * interpolate_theta(b, sc, x);
        }
    }
    return interpolate_theta(tr.states.back(), sc, x);
}

namespace {

ProbeReport probe_at(const Vec& theta, double x, double t, const HydroScenario& sc, const ProbeSystem& probe,
    const CMat& rho0, double tau_max, const RateProfile& rates)
{
    if (!(theta[0] > 0.0))
        throw Error(ErrorKind::Domain, "local control has theta_1 <= 0; no temperature to equilibrate to");
    ProbeReport rep;
    rep.x = x;
    rep.t = t;
    rep.beta = theta[0];
    rep.temperature = 1.0 / theta[0];
    rep.hydro_model = sc.model.name;
    rep.probe_label = "davies_probe_dim" + std::to_string(probe.dim());
    const ThermalGenerator g = build_davies_generator(probe, rep.beta, rates);
    rep.thermalization = thermalization_check(g, rho0, tau_max);
    rep.stationary_populations = populations(g, stationary_state(g));
    return rep;
}

} // namespace

ProbeReport local_probe_scenario(const Trajectory& tr, const HydroScenario& sc, double x, double t,
    const ProbeSystem& probe, const CMat& rho0, double tau_max, const RateProfile& rates)
{
    return probe_at(interpolate_theta(tr, sc, x, t), x, t, sc, probe, rho0, tau_max, rates);
}

ProbeReport local_probe_scenario(const HydroState& st, const HydroScenario& sc, double x, const ProbeSystem& probe,
    const CMat& rho0, double tau_max, const RateProfile& rates)
{
    return probe_at(interpolate_theta(st, sc, x), x, st.t, sc, probe, rho0, tau_max, rates);
}

} // namespace lte
