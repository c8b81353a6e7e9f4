#include "lte/hydro.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lte {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec empty_vec() { return Vec(); }

HydroModel closed_form_model(const std::string& name, const EntropyFunction& s, const ReducedPressure& pi)
{
    HydroModel m;
    m.name = name;
    m.dim = s.dim();
    m.theta_of = [s](const Vec& q, const Vec&) -> Vec {
        if (!s.domain().contains(q) || s.domain().on_boundary(q))
            throw Error(ErrorKind::StepRejected, "density left the interior of the entropy domain");
        Vec t = s.gradient(StateDensity(q));
        if (!t.allFinite())
            throw Error(ErrorKind::StepRejected, "entropy gradient diverged");
        return t;
    };
    m.q_of = [pi](const Vec& t) -> Vec { return -pi.gradient(ControlVariable(t)); };
    m.s_hessian = [s](const Vec& q, const Vec&) { return s.hessian(StateDensity(q)); };
    m.entropy = [s](const Vec& q, const Vec&) { return s.value(StateDensity(q)); };
    m.susceptibility = [pi](const Vec& t) { return pi.hessian(ControlVariable(t)); };
    return m;
}

HydroModel fermion_model(const FreeFermionChain& ff)
{
    HydroModel m;
    m.name = "free_fermion";
    m.dim = 2;
    m.theta_of = [ff](const Vec& q, const Vec& guess) -> Vec {
        if (!(q[1] > 0.0 && q[1] < 1.0) || std::abs(q[0]) >= 2.0 * std::abs(ff.hopping))
            throw Error(ErrorKind::StepRejected, "fermion density left the admissible region");
        // Warm-started Newton on q(θ) = q; the Jacobian of q(θ) is −π''.
        if (guess.size() == 2 && guess.allFinite()) {
            Vec t = guess;
            for (int it = 0; it < 30; ++it) {
                const Vec r = ff.density(ControlVariable(t)).q - q;
                if (r.cwiseAbs().maxCoeff() < 1e-14)
                    return t;
                const Vec dt = ff.susceptibility(ControlVariable(t)).ldlt().solve(r);
                if (!dt.allFinite() || dt.cwiseAbs().maxCoeff() > 1.0)
                    break;
                t += dt;
                if (dt.cwiseAbs().maxCoeff() < 1e-13 * (1.0 + t.cwiseAbs().maxCoeff()))
                    return t; // quadrature noise floor
            }
        }
        try {
            return ff.control_of(StateDensity(q)).theta;
        } catch (const Error& e) {
            throw Error(ErrorKind::StepRejected, e.what());
        }
    };
    m.q_of = [ff](const Vec& t) -> Vec { return ff.density(ControlVariable(t)).q; };
    m.s_hessian = [ff](const Vec&, const Vec& t) -> Mat {
        return -ff.susceptibility(ControlVariable(t)).inverse();
    };
    m.entropy = [ff](const Vec& q, const Vec& t) { return ff.pi_infinity(ControlVariable(t)) + t.dot(q); };
    m.susceptibility = [ff](const Vec& t) { return ff.susceptibility(ControlVariable(t)); };
    return m;
}

double spectral_radius(const Mat& m)
{
    if (m.rows() == 1)
        return std::abs(m(0, 0));
    return m.eigenvalues().cwiseAbs().maxCoeff();
}

} // namespace

HydroModel hydro_model(const Model& model)
{
    if (const auto* ff = std::get_if<FreeFermionChain>(&model))
        return fermion_model(*ff);
    if (std::holds_alternative<SpinChainED>(model))
        throw Error(ErrorKind::Unsupported, "spin_chain has no macroscopic entropy for hydrodynamics");
    return closed_form_model(model_name(model), model_entropy(model), model_pressure(model));
}

Onsager constant_onsager(int dim, double mobility)
{
    if (!(mobility >= 0.0))
        throw Error(ErrorKind::Input, "Onsager mobility must be non-negative");
    const Mat l = mobility * Mat::Identity(dim, dim);
    return [l](const Vec&) { return l; };
}

Onsager linear_onsager(int dim, double mobility)
{
    if (!(mobility >= 0.0))
        throw Error(ErrorKind::Input, "Onsager mobility must be non-negative");
    return [dim, mobility](const Vec& t) -> Mat { return mobility * std::max(t[0], 0.0) * Mat::Identity(dim, dim); };
}

std::string_view to_string(Boundary::Kind k) noexcept
{
    switch (k) {
    case Boundary::Kind::NoFlux: return "no_flux";
    case Boundary::Kind::Reservoir: return "reservoir";
    case Boundary::Kind::Periodic: return "periodic";
    }
    return "unknown";
}

void HydroScenario::validate() const
{
    if (!model.theta_of)
        throw Error(ErrorKind::Input, "hydro scenario has no model");
    if (!onsager)
        throw Error(ErrorKind::Input, "hydro scenario has no Onsager matrix");
    if (cells < 2 || cells > 4096)
        throw Error(ErrorKind::Input, "hydro grid must have between 2 and 4096 cells");
    if (!(length > 0.0))
        throw Error(ErrorKind::Input, "hydro domain length must be positive");
    if (!(scaling_exponent > 0.0))
        throw Error(ErrorKind::Input, "scaling exponent must be positive");
    if (scaling_exponent != 2.0)
        throw Error(ErrorKind::Unsupported, "only the diffusive class (scaling exponent 2) is implemented");
    if ((left.kind == Boundary::Kind::Periodic) != (right.kind == Boundary::Kind::Periodic))
        throw Error(ErrorKind::Input, "periodic boundaries must be set at both ends");
    for (const Boundary* b : {&left, &right})
        if (b->kind == Boundary::Kind::Reservoir && b->theta.size() != model.dim)
            throw Error(ErrorKind::Input, "reservoir control has the wrong dimension");
    if (!(cfl > 0.0 && cfl <= 0.5))
        throw Error(ErrorKind::Input, "CFL factor must lie in (0, 0.5]");
    if (!(t_end >= 0.0))
        throw Error(ErrorKind::Input, "t_end must be non-negative");
    // PSD Onsager matrix at the reservoir controls and at the initial data.
    std::vector<Vec> probes;
    for (const Boundary* b : {&left, &right})
        if (b->kind == Boundary::Kind::Reservoir)
            probes.push_back(b->theta);
    for (const Vec& t : probes) {
        const Mat l = onsager(t);
        if (max_abs(l - l.transpose()) > 1e-12 * (1.0 + max_abs(l)))
            throw Error(ErrorKind::Input, "Onsager matrix is not symmetric");
        Eigen::SelfAdjointEigenSolver<Mat> es(l);
        if (es.eigenvalues().minCoeff() < -1e-12)
            throw Error(ErrorKind::Input, "Onsager matrix is not positive semidefinite");
    }
}

HydroState make_state(const HydroScenario& sc, Mat q, double t, const Mat* warm)
{
    HydroState st;
    st.t = t;
    st.theta.resize(q.rows(), q.cols());
    for (Eigen::Index i = 0; i < q.cols(); ++i) {
        const Vec guess = warm ? Vec(warm->col(i)) : empty_vec();
        st.theta.col(i) = sc.model.theta_of(q.col(i), guess);
    }
    st.q = std::move(q);
    return st;
}

HydroState initial_state(const HydroScenario& sc)
{
    sc.validate();
    if (!sc.initial_q)
        throw Error(ErrorKind::Input, "hydro scenario has no initial data");
    Mat q(sc.model.dim, sc.cells);
    for (int i = 0; i < sc.cells; ++i) {
        const Vec v = sc.initial_q(sc.center(i));
        if (v.size() != sc.model.dim)
            throw Error(ErrorKind::Input, "initial data has the wrong dimension");
        q.col(i) = v;
    }
    try {
        return make_state(sc, std::move(q), 0.0);
    } catch (const Error& e) {
        throw Error(ErrorKind::Input, std::string("initial data outside the entropy domain: ") + e.what());
    }
}

namespace {

Mat fluxes_from_theta(const Mat& theta, const HydroScenario& sc, Exec exec)
{
    const Eigen::Index n = theta.rows();
    const int m = static_cast<int>(theta.cols());
    const double h = sc.spacing();
    Mat left(n, m + 1), right(n, m + 1);
    std::vector<double> dist(static_cast<std::size_t>(m + 1), h);
    for (int f = 1; f < m; ++f) {
        left.col(f) = theta.col(f - 1);
        right.col(f) = theta.col(f);
    }
    auto end_face = [&](const Boundary& b, int face, int inner, bool is_left) {
        switch (b.kind) {
        case Boundary::Kind::Reservoir:
            left.col(face) = is_left ? b.theta : Vec(theta.col(inner));
            right.col(face) = is_left ? Vec(theta.col(inner)) : b.theta;
            dist[static_cast<std::size_t>(face)] = 0.5 * h;
            break;
        case Boundary::Kind::Periodic:
            left.col(face) = theta.col(m - 1);
            right.col(face) = theta.col(0);
            break;
        case Boundary::Kind::NoFlux:
            left.col(face) = theta.col(inner);
            right.col(face) = theta.col(inner);
            break;
        }
    };
    end_face(sc.left, 0, 0, true);
    end_face(sc.right, m, m - 1, false);
    Mat out;
    kernels::face_fluxes(left, right, dist, sc.onsager, sc.flux_sign, out, exec);
    if (sc.left.kind == Boundary::Kind::NoFlux)
        out.col(0).setZero();
    if (sc.right.kind == Boundary::Kind::NoFlux)
        out.col(m).setZero();
    return out;
}

Mat rate_of_change(const Mat& flux, double h)
{
    const Eigen::Index m = flux.cols() - 1;
    return -(flux.rightCols(m) - flux.leftCols(m)) / h;
}

} // namespace

Mat face_fluxes(const HydroState& st, const HydroScenario& sc, Exec exec)
{
    return fluxes_from_theta(st.theta, sc, exec);
}

Mat divergence_residual(const Mat& theta, const HydroScenario& sc)
{
    return rate_of_change(fluxes_from_theta(theta, sc, Exec::Serial), sc.spacing());
}

double stable_time_step(const HydroState& st, const HydroScenario& sc)
{
    double worst = 0.0;
    for (int i = 0; i < st.cells(); ++i) {
        const Mat l = sc.onsager(st.theta.col(i));
        const Mat s2 = sc.model.s_hessian(st.q.col(i), st.theta.col(i));
        worst = std::max(worst, spectral_radius(l * s2.cwiseAbs()));
    }
    for (const Boundary* b : {&sc.left, &sc.right})
        if (b->kind == Boundary::Kind::Reservoir) {
            // Half-width boundary faces double the effective coupling.
            const int i = b == &sc.left ? 0 : st.cells() - 1;
            const Mat l = sc.onsager(0.5 * (b->theta + Vec(st.theta.col(i))));
            const Mat s2 = sc.model.s_hessian(st.q.col(i), st.theta.col(i));
            worst = std::max(worst, 1.5 * spectral_radius(l * s2.cwiseAbs()));
        }
    if (!(worst > 0.0) || !std::isfinite(worst))
        return worst == 0.0 ? kInf : 0.0;
    const double h = sc.spacing();
    return sc.cfl * h * h / worst;
}

HydroState step(const HydroState& st, const HydroScenario& sc, double dt, Exec exec)
{
    if (!(dt > 0.0))
        throw Error(ErrorKind::Input, "time step must be positive");
    const double bound = stable_time_step(st, sc);
    if (dt > bound * (1.0 + 1e-12))
        throw Error(ErrorKind::Input, "time step exceeds the stability bound");
    const Mat flux = fluxes_from_theta(st.theta, sc, exec);
    Mat q = st.q + dt * rate_of_change(flux, sc.spacing());
    return make_state(sc, std::move(q), st.t + dt, &st.theta);
}

Trajectory solve(const HydroScenario& sc, Exec exec)
{
    Trajectory tr;
    HydroState cur = initial_state(sc);
    std::vector<double> marks = sc.checkpoints;
    marks.push_back(sc.t_end);
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
    marks.erase(std::remove_if(marks.begin(), marks.end(), [&](double t) { return t < 0.0 || t > sc.t_end; }),
        marks.end());
    tr.states.push_back(cur);
    std::size_t next = 0;
    while (next < marks.size() && marks[next] <= 0.0)
        ++next;
    while (next < marks.size()) {
        const double bound = stable_time_step(cur, sc);
        const double remaining = marks[next] - cur.t;
        double dt = std::min(bound, remaining);
        bool done = false;
        for (int attempt = 0; attempt < 20 && !done; ++attempt) {
            try {
                HydroState nxt = step(cur, sc, dt, exec);
                if (dt == remaining)
                    nxt.t = marks[next];
                cur = std::move(nxt);
                done = true;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::StepRejected)
                    throw;
                ++tr.rejections;
                dt *= 0.5;
            }
        }
        if (!done) {
            std::ostringstream os;
            os << "hydro integration left the entropy domain at t = " << cur.t << " after 20 halvings; q = [";
            for (int i = 0; i < cur.cells(); ++i)
                os << (i ? " " : "") << cur.q(0, i);
            os << "]";
            throw Error(ErrorKind::Integrator, os.str());
        }
        ++tr.steps;
        const bool at_mark = cur.t >= marks[next];
        if (at_mark)
            ++next;
        if (at_mark || sc.record_every_step)
            tr.states.push_back(cur);
    }
    return tr;
}

Vec theta_at(const HydroState& st, const HydroScenario& sc, double x)
{
    const int i = std::clamp(static_cast<int>(std::floor(x / sc.spacing())), 0, st.cells() - 1);
    return st.theta.col(i);
}

const HydroState& state_at(const Trajectory& tr, double t)
{
    if (tr.states.empty())
        throw Error(ErrorKind::Input, "empty trajectory");
    const HydroState* best = &tr.states.front();
    for (const HydroState& s : tr.states)
        if (std::abs(s.t - t) < std::abs(best->t - t))
            best = &s;
    return *best;
}

EntropyBalance entropy_balance(const HydroState& st, const HydroScenario& sc)
{
    const double h = sc.spacing();
    const int m = st.cells();
    const Mat flux = fluxes_from_theta(st.theta, sc, Exec::Serial);
    const Mat dq = rate_of_change(flux, h);
    EntropyBalance b;
    b.t = st.t;
    CompensatedSum s, rate, prod;
    for (int i = 0; i < m; ++i) {
        s.add(h * sc.model.entropy(st.q.col(i), st.theta.col(i)));
        rate.add(h * st.theta.col(i).dot(dq.col(i)));
    }
    b.min_face_production = kInf;
    auto face = [&](int f, const Vec& tl, const Vec& tr) {
        const double p = (tr - tl).dot(flux.col(f));
        prod.add(p);
        b.min_face_production = std::min(b.min_face_production, p);
    };
    for (int f = 1; f < m; ++f)
        face(f, st.theta.col(f - 1), st.theta.col(f));
    double ja = 0.0, jb = 0.0;
    if (sc.left.kind == Boundary::Kind::Reservoir) {
        face(0, sc.left.theta, st.theta.col(0));
        ja = sc.left.theta.dot(flux.col(0));
    } else if (sc.left.kind == Boundary::Kind::Periodic) {
        face(0, st.theta.col(m - 1), st.theta.col(0));
    }
    if (sc.right.kind == Boundary::Kind::Reservoir) {
        face(m, st.theta.col(m - 1), sc.right.theta);
        jb = sc.right.theta.dot(flux.col(m));
    }
    b.total_entropy = s.value();
    b.rate = rate.value();
    b.production = prod.value();
    b.boundary_flux = jb - ja;
    b.balance_residual = std::abs(b.rate - (b.production - b.boundary_flux));
    return b;
}

EntropyDiagnostics entropy_diagnostics(const Trajectory& tr, const HydroScenario& sc, double tolerance)
{
    EntropyDiagnostics d;
    d.min_face_production = kInf;
    for (const HydroState& st : tr.states) {
        EntropyBalance b = entropy_balance(st, sc);
        if (!d.points.empty()) {
            const double drop = d.points.back().total_entropy - b.total_entropy;
            d.worst_decrease = std::max(d.worst_decrease, drop);
            if (drop > tolerance)
                d.nondecreasing = false;
        }
        d.min_face_production = std::min(d.min_face_production, b.min_face_production);
        d.max_balance_residual = std::max(d.max_balance_residual, b.balance_residual);
        d.points.push_back(b);
    }
    return d;
}

namespace {

double max_residual(const Mat& r) { return r.size() ? r.cwiseAbs().maxCoeff() : 0.0; }

bool newton_steady(const HydroScenario& sc, Mat& theta, int& iterations, double& residual)
{
    const int n = static_cast<int>(theta.rows());
    const int m = static_cast<int>(theta.cols());
    const int unknowns = n * m;
    auto flat = [n](int cell, int comp) { return cell * n + comp; };
    Mat r = divergence_residual(theta, sc);
    residual = max_residual(r);
    for (iterations = 0; iterations < 50 && residual >= 1e-10; ++iterations) {
        // Tridiagonal block structure: cells i ≡ c (mod 3) perturbed together.
        std::vector<Eigen::Triplet<double>> trips;
        for (int colour = 0; colour < 3; ++colour)
            for (int comp = 0; comp < n; ++comp) {
                Mat tp = theta;
                std::vector<double> steps(static_cast<std::size_t>(m), 0.0);
                for (int i = colour; i < m; i += 3) {
                    steps[static_cast<std::size_t>(i)] = 1e-7 * (1.0 + std::abs(theta(comp, i)));
                    tp(comp, i) += steps[static_cast<std::size_t>(i)];
                }
                const Mat rp = divergence_residual(tp, sc);
                for (int i = colour; i < m; i += 3)
                    for (int k = std::max(0, i - 1); k <= std::min(m - 1, i + 1); ++k)
                        for (int rc = 0; rc < n; ++rc) {
                            const double v = (rp(rc, k) - r(rc, k)) / steps[static_cast<std::size_t>(i)];
                            if (v != 0.0)
                                trips.emplace_back(flat(k, rc), flat(i, comp), v);
                        }
            }
        Eigen::SparseMatrix<double> jac(unknowns, unknowns);
        jac.setFromTriplets(trips.begin(), trips.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(jac);
        if (lu.info() != Eigen::Success)
            return false;
        Vec rhs(unknowns);
        for (int i = 0; i < m; ++i)
            for (int c = 0; c < n; ++c)
                rhs[flat(i, c)] = -r(c, i);
        const Vec delta = lu.solve(rhs);
        if (!delta.allFinite())
            return false;
        double lam = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 30; ++bt, lam *= 0.5) {
            Mat trial = theta;
            for (int i = 0; i < m; ++i)
                for (int c = 0; c < n; ++c)
                    trial(c, i) += lam * delta[flat(i, c)];
            const Mat rt = divergence_residual(trial, sc);
            const double res = max_residual(rt);
            if (std::isfinite(res) && res < residual) {
                theta = std::move(trial);
                r = rt;
                residual = res;
                accepted = true;
                break;
            }
        }
        if (!accepted)
            return residual < 1e-10;
    }
    return residual < 1e-10;
}

} // namespace

SteadyState steady_state(const HydroScenario& sc)
{
    sc.validate();
    if (sc.left.kind != Boundary::Kind::Reservoir || sc.right.kind != Boundary::Kind::Reservoir)
        throw Error(ErrorKind::Input, "steady_state needs reservoir controls at both ends");
    const int m = sc.cells;
    Mat theta(sc.model.dim, m);
    for (int i = 0; i < m; ++i) {
        const double w = sc.center(i) / sc.length;
        theta.col(i) = (1.0 - w) * sc.left.theta + w * sc.right.theta;
    }
    SteadyState out;
    double residual = 0.0;
    int iterations = 0;
    bool ok = false;
    try {
        ok = newton_steady(sc, theta, iterations, residual);
    } catch (const Error&) {
        ok = false;
    }
    if (ok) {
        Mat q(sc.model.dim, m);
        for (int i = 0; i < m; ++i)
            q.col(i) = sc.model.q_of(theta.col(i));
        out.state.t = kInf;
        out.state.q = std::move(q);
        out.state.theta = theta;
        out.method = "newton";
        out.iterations = iterations;
        out.residual = residual;
        return out;
    }
    // Relaxation fallback: march the evolution from the linear guess.
    Mat q(sc.model.dim, m);
    for (int i = 0; i < m; ++i)
        q.col(i) = sc.model.q_of(theta.col(i));
    HydroState cur = make_state(sc, std::move(q), 0.0);
    int steps = 0;
    double res = max_residual(divergence_residual(cur.theta, sc));
    while (res >= 1e-10 && steps < 2'000'000) {
        cur = step(cur, sc, stable_time_step(cur, sc));
        ++steps;
        if (steps % 100 == 0)
            res = max_residual(divergence_residual(cur.theta, sc));
    }
    if (res >= 1e-10)
        throw Error(ErrorKind::Convergence, "steady state not reached by Newton or relaxation");
    out.state = std::move(cur);
    out.method = "relaxation";
    out.iterations = steps;
    out.residual = res;
    return out;
}

ScaleReport scale_invariance_check(const HydroScenario& sc, int lambda, double t_star, Exec exec)
{
    if (lambda < 1)
        throw Error(ErrorKind::Input, "scale factor must be a positive integer");
    if (!(t_star > 0.0))
        throw Error(ErrorKind::Input, "scale check needs a positive time");
    if (sc.scaling_exponent != 2.0)
        throw Error(ErrorKind::Unsupported, "scale check implemented for the diffusive class only");
    HydroScenario base = sc;
    base.t_end = t_star;
    base.checkpoints.clear();
    base.record_every_step = false;
    HydroScenario big = base;
    big.cells = lambda * sc.cells;
    big.length = lambda * sc.length;
    big.t_end = std::pow(static_cast<double>(lambda), sc.scaling_exponent) * t_star;
    const auto q0 = sc.initial_q;
    const double lam = lambda;
    big.initial_q = [q0, lam](double y) { return q0(y / lam); };

    const HydroState a = solve(base, exec).states.back();
    const HydroState b = solve(big, exec).states.back();
    ScaleReport rep;
    rep.lambda = lambda;
    rep.t_star = t_star;
    rep.cells = sc.cells;
    const double h = sc.spacing();
    rep.tolerance = 10.0 * h * h;
    for (int i = 0; i < sc.cells; ++i) {
        const Vec avg = b.q.middleCols(static_cast<Eigen::Index>(i) * lambda, lambda).rowwise().mean();
        rep.max_deviation = std::max(rep.max_deviation, (avg - Vec(a.q.col(i))).cwiseAbs().maxCoeff());
    }
    rep.passed = rep.max_deviation <= rep.tolerance;
    return rep;
}

} // namespace lte
