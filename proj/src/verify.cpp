#include "lte/verify.hpp"

#include "lte/fluctuations.hpp"
#include "lte/pipeline.hpp"
#include "lte/quantum_stat.hpp"
#include "lte/zeroth_law.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace lte {

namespace {

using ojson = nlohmann::ordered_json;

CheckRecord bound(double value, double tol)
{
    CheckRecord r;
    r.value = value;
    r.expected = 0.0;
    r.tolerance = tol;
    r.pass = std::isfinite(value) && value <= tol;
    return r;
}

CheckRecord flag(bool ok, double value = 0.0)
{
    CheckRecord r;
    r.value = value;
    r.expected = value;
    r.pass = ok;
    return r;
}

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        v[static_cast<std::size_t>(k)] = a + (b - a) * k / (n - 1);
    return v;
}

std::vector<std::pair<Model, std::vector<ControlVariable>>> smooth_catalog(int points)
{
    std::vector<ControlVariable> one, two;
    for (double t : linspace(0.2, 3.0, points))
        one.push_back(ControlVariable{t});
    const std::vector<double> t2 = linspace(-1.0, 1.0, 5);
    for (int k = 0; k < points; ++k)
        two.push_back(ControlVariable{0.3 + 2.7 * k / (points - 1), t2[static_cast<std::size_t>(k % 5)]});
    std::vector<ControlVariable> quad;
    for (double t : linspace(-2.5, 2.5, points))
        quad.push_back(ControlVariable{t});
    return {{Paramagnet{}, one}, {QuadraticModel{}, quad}, {FreeFermionChain{}, two}};
}

// ---- hydro fixtures ------------------------------------------------------------

HydroScenario paramagnet_step(const VerifyOptions& opt, double t_end)
{
    HydroScenario sc;
    sc.model = hydro_model(Paramagnet{});
    sc.onsager = constant_onsager(1, 1.0);
    sc.cells = 64;
    sc.initial_q = [](double x) { return Vec::Constant(1, -std::tanh(x < 0.5 ? 0.5 : 1.5)); };
    sc.t_end = t_end;
    sc.flux_sign = opt.flux_sign;
    sc.record_every_step = true;
    return sc;
}

HydroScenario cosine_relaxation(const Model& m, const VerifyOptions& opt)
{
    HydroScenario sc;
    sc.model = hydro_model(m);
    sc.onsager = constant_onsager(1, 1.0);
    sc.cells = 64;
    const HydroModel hm = sc.model;
    sc.initial_q = [hm](double x) { return hm.q_of(Vec::Constant(1, 1.0 + 0.3 * std::cos(M_PI * x))); };
    sc.flux_sign = opt.flux_sign;
    return sc;
}

HydroScenario driven(const Model& m, double lo, double hi, const VerifyOptions& opt)
{
    HydroScenario sc;
    sc.model = hydro_model(m);
    sc.onsager = constant_onsager(sc.model.dim, 1.0);
    sc.cells = 64;
    Vec a = Vec::Zero(sc.model.dim), b = Vec::Zero(sc.model.dim);
    a[0] = lo;
    b[0] = hi;
    sc.left = Boundary::reservoir(a);
    sc.right = Boundary::reservoir(b);
    const HydroModel hm = sc.model;
    sc.initial_q = [hm, a](double) { return hm.q_of(a); };
    sc.flux_sign = opt.flux_sign;
    return sc;
}

double spread(const HydroState& st)
{
    const double mean = st.theta.row(0).mean();
    return (st.theta.row(0).array() - mean).abs().maxCoeff();
}

// ---- fluctuation fixtures ----------------------------------------------------------------

std::shared_ptr<CovarianceField> paramagnet_field(int cells, double lo, double hi)
{
    const HydroModel hm = hydro_model(Paramagnet{});
    ControlField cf{CellGrid{cells, 1.0}, Mat(1, cells)};
    for (int i = 0; i < cells; ++i)
        cf.theta(0, i) = lo + (hi - lo) * cf.grid.center(i);
    return std::make_shared<CovarianceField>(cf, hm.susceptibility);
}

double grid_covariance(const CovarianceField& c, const Smearing& f, const Smearing& g)
{
    CompensatedSum acc;
    const double h = c.grid().spacing();
    for (std::size_t a = 0; a < f.cells.size(); ++a)
        for (std::size_t b = 0; b < g.cells.size(); ++b)
            if (f.cells[a] == g.cells[b])
                acc.add(f.weights.col(static_cast<Eigen::Index>(a)).dot(
                            c.covariance(f.cells[a]) * g.weights.col(static_cast<Eigen::Index>(b)))
                    / h);
    return acc.value();
}

// ---- runner fixtures ------------------------------------------------------------------------

const char* kDrivenFermions = R"(
seed = 7
[model]
kind = "free_fermion"
[hydro]
cells = 32
t_end = 0.01
[hydro.left]
kind = "reservoir"
theta = [0.5, 0.0]
[hydro.right]
kind = "reservoir"
theta = [1.5, 0.2]
[hydro.initial]
kind = "linear"
theta_left = [0.5, 0.0]
theta_right = [1.5, 0.2]
[lte]
points = [[0.25, 0.01], [0.5, 0.01], [0.75, 0.01]]
[quantum]
covariance_sites = 512
)";

const char* kSmallParamagnet = R"(
seed = 11
[model]
kind = "paramagnet"
[hydro]
cells = 32
t_end = 0.01
[hydro.left]
kind = "reservoir"
theta = [0.5]
[hydro.right]
kind = "reservoir"
theta = [1.5]
[lte]
points = [[0.25, 0.01], [0.75, 0.01]]
[fluctuations]
samples = 2000
eps = [0.2, 0.1]
cells = 1000
)";

} // namespace

std::vector<SuiteEntry> verification_suite(const VerifyOptions& opt)
{
    std::vector<SuiteEntry> s;
    const std::uint64_t seed = opt.seed;
    const Exec exec = opt.exec;

    // ---- thermo --------------------------------------------------------------------
    s.push_back({"thermo.biconjugation", "s** equals the concave envelope of s on the grid", [] {
        double worst = 0.0;
        const std::vector<double> thetas = linspace(-8.0, 8.0, 3201);
        auto run = [&](const Tabulated1D& raw, double lo, double hi) {
            const Tabulated1D env = concave_envelope_table(raw);
            const Tabulated1D bi = discrete_biconjugate(discrete_conjugate(raw, thetas), raw.x);
            for (std::size_t i = 0; i < raw.size(); ++i)
                if (raw.x[i] >= lo && raw.x[i] <= hi)
                    worst = std::max(worst, std::abs(bi.y[i] - env.y[i]));
        };
        const EntropyFunction pm = Paramagnet{}.entropy();
        run(Tabulated1D::sample([&](double q) { return pm.value(StateDensity{q}); }, -1.0, 1.0, 801), -0.95, 0.95);
        run(Tabulated1D::sample([](double q) { return -0.5 * q * q; }, -3.0, 3.0, 801), -2.5, 2.5);
        run(DoubleWell{}.raw_table(801), -1.5, 1.5);
        return bound(worst, 1e-4);
    }});
    s.push_back({"thermo.legendre_identity", "π(θ) = s(q★) − θ·q★ with q★ = −π'(θ)", [] {
        double worst = 0.0;
        for (const auto& [m, grid] : smooth_catalog(20)) {
            const EntropyFunction en = model_entropy(m);
            const ReducedPressure pi = model_pressure(m);
            for (const ControlVariable& t : grid) {
                const StateDensity q = q_of_theta(pi, t);
                worst = std::max(worst, std::abs(pi.value(t) - (en.value(q) - t.theta.dot(q.q))));
            }
        }
        return bound(worst, 1e-8);
    }});
    s.push_back({"thermo.monotone_duality", "θ ↦ q(θ) is order-reversing along each axis", [] {
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& [m, grid] : smooth_catalog(12)) {
            const ReducedPressure pi = model_pressure(m);
            for (const ControlVariable& t : grid)
                for (int k = 0; k < t.dim(); ++k) {
                    Vec up = t.theta;
                    up[k] += 1e-3;
                    const double dq = q_of_theta(pi, ControlVariable(up)).q[k] - q_of_theta(pi, t).q[k];
                    worst = std::max(worst, dq);
                }
        }
        CheckRecord r = flag(worst < 0.0, worst);
        r.expected = 0.0;
        return r;
    }});
    s.push_back({"thermo.hessian_duality", "π''(θ)·s''(q(θ)) = −I", [] {
        double worst = 0.0;
        for (const auto& [m, grid] : smooth_catalog(10))
            for (const ControlVariable& t : grid)
                worst = std::max(worst, hessian_pair_check(model_entropy(m), model_pressure(m), t));
        return bound(worst, 1e-6);
    }});
    s.push_back({"thermo.tangent_containment", "−q★(θ) lies in the tangent set at every tabulated θ", [] {
        const Tabulated1D raw = DoubleWell{}.raw_table(801);
        const std::vector<double> grid = linspace(-2.0, 2.0, 401);
        const Tabulated1D pit = discrete_conjugate(raw, grid);
        const double tol = 2.0 * (raw.x[1] - raw.x[0]);
        int misses = 0;
        for (std::size_t k = 2; k + 2 < grid.size(); ++k) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < raw.size(); ++i)
                if (raw.y[i] - grid[k] * raw.x[i] > raw.y[best] - grid[k] * raw.x[best])
                    best = i;
            if (!tangent_set(pit, grid[k]).contains(-raw.x[best], tol))
                ++misses;
        }
        CheckRecord r = flag(misses == 0, misses);
        r.expected = 0.0;
        return r;
    }});
    s.push_back({"thermo.coexistence", "double-well tangent set at θ = 0 is [−1, 1]", [] {
        const Tabulated1D raw = DoubleWell{}.raw_table(801);
        const Tabulated1D pit = discrete_conjugate(raw, linspace(-2.0, 2.0, 401));
        const TangentSet ts = tangent_set(pit, 0.0);
        const double err = std::max(std::abs(ts.r_min + 1.0), std::abs(ts.r_max - 1.0));
        return bound(err, 2.0 * (raw.x[1] - raw.x[0]));
    }});

    // ---- models ------------------------------------------------------------------
    s.push_back({"models.closed_form_agreement", "closed-form and numeric conjugates agree on a 20-point θ grid", [] {
        double worst = 0.0;
        for (const auto& [m, grid] : smooth_catalog(20))
            for (const ControlVariable& t : grid)
                worst = std::max(worst, closed_form_check(m, t).max_deviation_from_numeric);
        return bound(worst, 1e-8);
    }});
    s.push_back({"models.particle_hole", "n(θ₁, 0) = 1/2 and π(θ₁, θ₂) − π(θ₁, −θ₂) = −θ₂", [] {
        const FreeFermionChain ff;
        const ReducedPressure pi = ff.pressure();
        double worst = 0.0;
        for (double t1 : {0.3, 1.0, 2.5}) {
            worst = std::max(worst, std::abs(ff.density(ControlVariable{t1, 0.0}).q[1] - 0.5));
            for (double t2 : {0.2, 0.9})
                worst = std::max(worst,
                    std::abs(pi.value(ControlVariable{t1, t2}) - pi.value(ControlVariable{t1, -t2}) + t2));
        }
        return bound(worst, 1e-10);
    }});
    s.push_back({"models.paramagnet_identity", "sech²(θ)·cosh²(θ) = 1 through the closed forms", [] {
        const Paramagnet pm;
        double worst = 0.0;
        for (double t : linspace(-3.0, 3.0, 13)) {
            const ControlVariable c{t};
            const StateDensity q = q_of_theta(pm.pressure(), c);
            worst = std::max(worst, std::abs(pm.pressure().hessian(c)(0, 0) * pm.entropy().hessian(q)(0, 0) + 1.0));
        }
        return bound(worst, 1e-10);
    }});

    // ---- quantum -----------------------------------------------------------------
    s.push_back({"quantum.gibbs_identity", "ŝ_L = π_L + θ·q̂ for every backend", [exec] {
        double worst = 0.0;
        const std::vector<std::pair<FiniteRealization, std::vector<ControlVariable>>> cases{
            {build_finite_model(Paramagnet{}, 8), {ControlVariable{0.4}, ControlVariable{2.0}}},
            {build_finite_model(SpinChainED{6, 1.0, 0.5, 0.2}, 6), {ControlVariable{0.7, 0.3}, ControlVariable{1.5, -0.4}}},
            {build_dense_fermion_chain(FreeFermionChain{}, 6), {ControlVariable{1.0, 0.0}, ControlVariable{0.5, 0.8}}},
            {build_finite_model(FreeFermionChain{}, 64), {ControlVariable{1.0, 0.0}, ControlVariable{0.5, 0.8}}}};
        for (const auto& [real, thetas] : cases) {
            const GibbsStateFactory fac(real, exec);
            for (const ControlVariable& t : thetas) {
                const FiniteGibbsState st = fac.at(t);
                const double rhs = pi_L(fac, t) + t.theta.dot(gibbs_moments(st).density.q);
                worst = std::max(worst, std::abs(entropy_density_L(st) - rhs));
            }
        }
        return bound(worst, 1e-10);
    }});
    s.push_back({"quantum.duality_chain", "−∇π_L = q̂ and π_L'' = Cov(Q̂)/L", [exec] {
        double grad = 0.0, hess = 0.0;
        for (const auto& [real, t] : std::vector<std::pair<FiniteRealization, ControlVariable>>{
                 {build_finite_model(Paramagnet{}, 8), ControlVariable{0.8}},
                 {build_finite_model(SpinChainED{8, 1.0, 0.5, 0.0}, 8), ControlVariable{1.0, 0.2}},
                 {build_finite_model(FreeFermionChain{}, 512), ControlVariable{1.0, 0.3}}}) {
            const GibbsStateFactory fac(real, exec);
            const GibbsMoments mo = gibbs_moments(fac.at(t));
            const Vec g = fd_gradient([&](const Vec& v) { return pi_L(fac, ControlVariable(v)); }, t.theta);
            grad = std::max(grad, (g + mo.density.q).cwiseAbs().maxCoeff());
            hess = std::max(hess, max_abs(mo.covariance - pi_L_hessian_fd(fac, t)));
        }
        CheckRecord r = bound(std::max(grad, hess), 1e-6);
        r.detail["gradient_residual"] = grad;
        r.detail["hessian_residual"] = hess;
        return r;
    }});
    s.push_back({"quantum.half_filling_variance", "Var(N)/L = 1/4 at θ = (0⁺, 0)", [exec] {
        const GibbsStateFactory fac(build_finite_model(FreeFermionChain{}, 512), exec);
        const double v = gibbs_moments(fac.at(ControlVariable{kZeroPlus, 0.0})).covariance(1, 1);
        CheckRecord r = compare_record(Level::Verify, "", v, 0.25, 1e-10);
        return r;
    }});
    s.push_back({"quantum.kms", "⟨α_τ(A)B⟩ = ⟨B α_{τ+iβ}(A)⟩ for random finite Gibbs states", [seed] {
        const CounterRng rng(seed);
        double worst = 0.0;
        for (std::uint64_t k = 0; k < 50; ++k) {
            const int d = 2 + static_cast<int>(rng.bits(k, 0, 0) % 15);
            const double beta = 0.1 + 4.9 * rng.uniform(k, 1, 0);
            const double tau = -3.0 + 6.0 * rng.uniform(k, 2, 0);
            const std::uint64_t s0 = rng.bits(k, 3, 0);
            const CMat a = random_hermitian(d, s0 + 1) + std::complex<double>(0.0, 1.0) * random_hermitian(d, s0 + 2);
            worst = std::max(worst, kms_check(3.0 * random_hermitian(d, s0), beta, {"A", a},
                                        {"B", random_hermitian(d, s0 + 3)}, {tau})
                                        .max_residual);
        }
        return bound(worst, 1e-10);
    }});
    s.push_back({"quantum.kms_two_level", "two-level case with A = B = σx: both sides equal 1", [] {
        CMat h = CMat::Zero(2, 2);
        h(1, 1) = 1.0;
        CMat sx = CMat::Zero(2, 2);
        sx(0, 1) = sx(1, 0) = 1.0;
        const KMSCheckReport k = kms_check(h, 0.9, {"sx", sx}, {"sx", sx}, {0.0});
        const KmsEntry& e = k.entries.front();
        const double err = std::max(std::abs(e.lhs - 1.0), std::abs(e.rhs - 1.0));
        return bound(err, 1e-14);
    }});
    s.push_back({"quantum.backend_agreement", "dense and mode-sum free-fermion backends agree for L ≤ 10", [exec] {
        double worst = 0.0;
        for (int l : {4, 6, 8}) {
            const GibbsStateFactory dense(build_dense_fermion_chain(FreeFermionChain{}, l), exec);
            const GibbsStateFactory fast(build_finite_model(FreeFermionChain{}, l), exec);
            for (const ControlVariable& t : {ControlVariable{1.0, 0.0}, ControlVariable{0.4, -0.7}}) {
                const FiniteGibbsState a = dense.at(t), b = fast.at(t);
                worst = std::max({worst, std::abs(pi_L(dense, t) - pi_L(fast, t)),
                    (gibbs_moments(a).density.q - gibbs_moments(b).density.q).cwiseAbs().maxCoeff(),
                    std::abs(entropy_density_L(a) - entropy_density_L(b))});
            }
        }
        return bound(worst, 1e-10);
    }});
    s.push_back({"quantum.gts_variational", "π_L ≥ ŝ(ρ') − θ·q̂(ρ') with equality only at ρ' = ρ", [seed, exec] {
        const GibbsStateFactory fac(build_finite_model(SpinChainED{4, 1.0, 0.3, 0.1}, 4), exec);
        const ControlVariable t{0.9, 0.2};
        std::vector<Perturbation> pert{{0.0, {}}};
        for (std::uint64_t k = 0; k < 3; ++k)
            for (double lam : {0.05, 0.5, 1.0})
                pert.push_back({lam, random_pure_state(16, seed + k)});
        const GtsReport g = gts_variational_check(fac, t, pert);
        double min_gap = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k < g.entries.size(); ++k)
            min_gap = std::min(min_gap, g.entries[k].gap);
        CheckRecord r = flag(g.holds && std::abs(g.entries.front().gap) <= 1e-12 && min_gap > 0.0, min_gap);
        r.detail["unperturbed_gap"] = g.entries.front().gap;
        return r;
    }});
    s.push_back({"quantum.pi_convergence", "π_L → π_∞ monotonically for free fermions, π_8 frozen", [] {
        std::vector<int> sites;
        for (int l = 8; l <= 1024; l *= 2)
            sites.push_back(l);
        const PiConvergenceReport pc = pi_convergence(FreeFermionChain{}, ControlVariable{1.0, 0.0}, sites);
        CheckRecord r = flag(pc.monotone && pc.deviations.back() < 1e-6 && std::abs(pc.values.front() - 0.917383049284875) < 1e-12,
            pc.deviations.back());
        r.detail["pi_8"] = pc.values.front();
        return r;
    }});
    s.push_back({"quantum.completeness", "q(θ) injective and θ minimal for the catalog realizations", [] {
        std::vector<ControlVariable> grid;
        for (double t1 : {0.5, 1.0, 2.0})
            for (double t2 : {-1.0, 0.0, 1.0})
                grid.push_back(ControlVariable{t1, t2});
        const CompletenessReport f = completeness_check(FreeFermionChain{}, grid);
        const CompletenessReport p = completeness_check(Paramagnet{}, {ControlVariable{0.5}, ControlVariable{2.0}});
        return flag(f.injectivity == Verdict::Pass && f.minimality == Verdict::Pass && p.injectivity == Verdict::Pass
                && p.minimality == Verdict::Vacuous,
            f.min_hessian_eigenvalue);
    }});
    s.push_back({"quantum.local_restriction", "window averages of a slowly varying Gibbs state match ω_θ(x)", [] {
        auto energy_dev = [](int sites, bool linear) {
            LocalGibbsProfile prof{[linear](double x) { return ControlVariable{linear ? 0.5 + x : 1.0, 0.0}; }, sites, 1.0};
            const RestrictionEntry e = local_restriction_check(prof, 11, {0.5}).entries.front();
            return linear ? e.energy_deviation : std::max(e.energy_deviation, e.density_deviation);
        };
        const double constant = energy_dev(400, false);
        const double ratio = energy_dev(200, true) / energy_dev(800, true);
        CheckRecord r = flag(constant < 1e-10 && ratio >= 2.0 && ratio <= 6.0, ratio);
        r.detail["constant_profile_deviation"] = constant;
        return r;
    }});

    // ---- hydro -------------------------------------------------------------------
    s.push_back({"hydro.conservation", "Σ qᵢh is constant with no-flux ends", [opt, exec] {
        const HydroScenario sc = paramagnet_step(opt, 0.02);
        const Trajectory tr = solve(sc, exec);
        const double h = sc.spacing();
        const double total0 = h * tr.states.front().q.sum();
        double worst = 0.0;
        for (std::size_t k = 1; k < tr.states.size(); ++k)
            worst = std::max(worst, std::abs(h * tr.states[k].q.sum() - h * tr.states[k - 1].q.sum()));
        CheckRecord r = bound(worst, 1e-12 * (1.0 + std::abs(total0)));
        r.detail["steps"] = tr.steps;
        return r;
    }});
    s.push_back({"hydro.second_law", "Σ_faces Δθ·j ≥ 0 face by face, S(t) nondecreasing", [opt, exec] {
        const HydroScenario sc = paramagnet_step(opt, 0.005);
        // Face production is checked on the initial data first; an anti-diffusive flux can
        // leave the entropy domain before a trajectory exists.
        const EntropyBalance b0 = entropy_balance(initial_state(sc), sc);
        if (b0.min_face_production < -1e-12) {
            CheckRecord r = flag(false, b0.min_face_production);
            r.detail["stage"] = "initial data";
            return r;
        }
        const EntropyDiagnostics d = entropy_diagnostics(solve(sc, exec), sc);
        CheckRecord r = flag(d.min_face_production >= -1e-12 && d.nondecreasing, d.min_face_production);
        r.expected = 0.0;
        r.detail["worst_entropy_decrease"] = d.worst_decrease;
        return r;
    }});
    s.push_back({"hydro.entropy_balance", "dS/dt = production + boundary entropy flux", [opt, exec] {
        const HydroScenario sc = driven(Paramagnet{}, 0.5, 1.5, opt);
        HydroScenario run = sc;
        run.t_end = 0.01;
        return bound(entropy_diagnostics(solve(run, exec), run).max_balance_residual, 1e-8);
    }});
    s.push_back({"hydro.flux_direction", "energy flows from the hot end to the cold end", [opt, exec] {
        const HydroScenario sc = paramagnet_step(opt, 0.01);
        const Trajectory tr = solve(sc, exec);
        const int half = sc.cells / 2;
        const double before = tr.states.front().q.leftCols(half).sum();
        const double after = tr.states.back().q.leftCols(half).sum();
        return flag(after < before, after - before);
    }});
    s.push_back({"hydro.h_theorem", "max|θᵢ − θ̄| decays monotonically in a closed system", [opt, exec] {
        HydroScenario sc = cosine_relaxation(Paramagnet{}, opt);
        sc.t_end = 0.05;
        sc.record_every_step = true;
        const Trajectory tr = solve(sc, exec);
        bool mono = true;
        for (std::size_t k = tr.states.size() / 10 + 1; k < tr.states.size(); ++k)
            mono = mono && spread(tr.states[k]) <= spread(tr.states[k - 1]) + 1e-14;
        return flag(mono && spread(tr.states.back()) < spread(tr.states.front()), spread(tr.states.back()));
    }});
    s.push_back({"hydro.theta_formulation", "evolving q matches evolving θ directly (quadratic model)", [opt, exec] {
        HydroScenario sc = cosine_relaxation(QuadraticModel{}, opt);
        HydroState st = initial_state(sc);
        Vec th = st.theta.row(0).transpose();
        const double dt = stable_time_step(st, sc);
        const double h = sc.spacing();
        const int m = sc.cells;
        for (int n = 0; n < 200; ++n) {
            st = step(st, sc, dt, exec);
            Vec next = th;
            for (int i = 0; i < m; ++i) {
                const double l = i > 0 ? th[i - 1] : th[i];
                const double r = i + 1 < m ? th[i + 1] : th[i];
                next[i] = th[i] + opt.flux_sign * dt * (l - 2.0 * th[i] + r) / (h * h);
            }
            th = next;
        }
        return bound((st.theta.row(0).transpose() - th).cwiseAbs().maxCoeff(), 1e-12);
    }});
    s.push_back({"hydro.steady_state", "driven steady state is linear in θ for constant L", [opt] {
        const HydroScenario sc = driven(Paramagnet{}, 0.5, 1.5, opt);
        const SteadyState ss = steady_state(sc);
        double worst = 0.0;
        for (int i = 0; i < sc.cells; ++i)
            worst = std::max(worst, std::abs(ss.state.theta(0, i) - (0.5 + sc.center(i))));
        return bound(worst, 1e-6);
    }});
    s.push_back({"hydro.scale_invariance", "x → λx, t → λ²t maps solutions to solutions", [opt, exec] {
        double worst = 0.0;
        bool ok = true;
        for (const Model& m : {Model{QuadraticModel{}}, Model{Paramagnet{}}}) {
            const ScaleReport r = scale_invariance_check(cosine_relaxation(m, opt), 2, 0.02, exec);
            worst = std::max(worst, r.max_deviation);
            ok = ok && r.passed;
        }
        CheckRecord r = flag(ok, worst);
        r.tolerance = 10.0 / (64.0 * 64.0);
        return r;
    }});

    // ---- fluctuations -------------------------------------------------------------
    s.push_back({"fluctuations.gaussianity", "skewness and excess kurtosis of ξ(f) vanish within 3 standard errors", [seed, exec] {
        const auto c = paramagnet_field(400, 0.5, 1.5);
        const std::size_t n = 20000;
        const std::vector<double> d = smeared_draws(*c, discretize(ScaledTestFunction{{}, 0.5, 0.2}, c->grid()),
            CounterRng(seed), n, exec);
        const SampleMoments mo = sample_moments(d);
        // Standard errors of the sample skewness and excess kurtosis of a normal law: √(6/N), √(24/N).
        const double rn = std::sqrt(static_cast<double>(n));
        const double z = std::max(std::abs(mo.skewness) * rn / std::sqrt(6.0), std::abs(mo.excess_kurtosis) * rn / std::sqrt(24.0));
        CheckRecord r = bound(z, 3.0);
        r.detail["unit"] = "standard errors";
        r.detail["samples"] = n;
        r.detail["skewness"] = mo.skewness;
        r.detail["excess_kurtosis"] = mo.excess_kurtosis;
        return r;
    }});
    s.push_back({"fluctuations.covariance", "Cov(ξ(f), ξ(g)) = ∫ f·π''(θ(x))·g dx for overlapping bumps", [seed, exec] {
        const auto c = paramagnet_field(400, 0.5, 1.5);
        const std::size_t n = 20000;
        const CounterRng rng(seed + 1);
        std::vector<Smearing> basis;
        for (double x0 : {0.4, 0.5, 0.6})
            basis.push_back(discretize(ScaledTestFunction{{}, x0, 0.15}, c->grid()));
        std::vector<std::vector<double>> draws;
        for (const Smearing& b : basis)
            draws.push_back(smeared_draws(*c, b, rng, n, exec));
        double worst = 0.0;
        for (std::size_t a = 0; a < basis.size(); ++a)
            for (std::size_t b = a; b < basis.size(); ++b) {
                const double exact = grid_covariance(*c, basis[a], basis[b]);
                const double va = grid_covariance(*c, basis[a], basis[a]);
                const double vb = grid_covariance(*c, basis[b], basis[b]);
                const double se = std::sqrt((va * vb + exact * exact) / static_cast<double>(n));
                worst = std::max(worst, std::abs(sample_covariance(draws[a], draws[b]) - exact) / se);
            }
        CheckRecord r = bound(worst, 3.0);
        r.detail["unit"] = "standard errors";
        return r;
    }});
    s.push_back({"fluctuations.uniform_variance", "uniform θ: Var ξ(f_ε) = (256/315)·π''", [seed, exec] {
        const auto c = paramagnet_field(400, 1.0, 1.0);
        const std::size_t n = 20000;
        const std::vector<double> d = smeared_draws(*c, discretize(ScaledTestFunction{{}, 0.5, 0.2}, c->grid()),
            CounterRng(seed + 2), n, exec);
        const SampleMoments mo = sample_moments(d);
        const double target = 256.0 / 315.0 / std::pow(std::cosh(1.0), 2);
        CheckRecord r = compare_record(Level::Verify, "", mo.variance, target, 3.0 * mo.variance_standard_error());
        return r;
    }});
    s.push_back({"fluctuations.punctual", "bias of Var ξ(f_{x,ε}) shrinks like ε² on a linear profile", [seed, exec] {
        const auto c = paramagnet_field(1000, 0.5, 1.5);
        const PunctualReport p =
            punctual_covariance_check(*c, TestFunction{}, 0.25, {0.2, 0.1, 0.05}, 20000, CounterRng(seed + 3), exec);
        CheckRecord r = flag(p.passed, p.bias_slope);
        r.expected = 2.0;
        return r;
    }});
    s.push_back({"fluctuations.scaling", "the law of ε^{-1/2}ξ(f(·/ε)) does not depend on ε at uniform θ", [seed, exec] {
        const auto c = paramagnet_field(800, 1.0, 1.0);
        const ScalingReport sr =
            scaling_invariance_check(*c, TestFunction{}, 0.5, {0.3, 0.15, 0.075}, 20000, CounterRng(seed + 4), exec);
        return flag(sr.passed, sr.max_pairwise);
    }});
    s.push_back({"fluctuations.meso_micro_bridge", "sampler covariance π'' equals Cov(Q̂)/L", [exec] {
        const ControlVariable t{1.0, 0.3};
        const Mat meso = hydro_model(FreeFermionChain{}).susceptibility(t.theta);
        const GibbsStateFactory fac(build_finite_model(FreeFermionChain{}, 512), exec);
        return bound(max_abs(meso - gibbs_moments(fac.at(t)).covariance), 1e-6);
    }});
    s.push_back({"fluctuations.seed_determinism", "identical seeds give bit-identical draws in serial and parallel", [seed] {
        const auto c = paramagnet_field(200, 0.5, 1.5);
        const Smearing sm = discretize(ScaledTestFunction{{}, 0.5, 0.2}, c->grid());
        const std::vector<double> a = smeared_draws(*c, sm, CounterRng(seed), 4000, Exec::Parallel);
        const std::vector<double> b = smeared_draws(*c, sm, CounterRng(seed), 4000, Exec::Serial);
        const std::vector<double> d = smeared_draws(*c, sm, CounterRng(seed + 1), 4000, Exec::Parallel);
        return flag(a == b && a != d);
    }});

    // ---- zeroth law ---------------------------------------------------------------
    auto probes = [seed] {
        return std::vector<ProbeSystem>{qubit_probe(1.0), random_probe(3, seed), random_probe(4, seed + 1)};
    };
    s.push_back({"zeroth.fixed_point", "the generator annihilates Gibbs(β)", [probes] {
        double worst = 0.0;
        for (const ProbeSystem& p : probes())
            for (double beta : {0.3, 1.0, 2.5}) {
                const ThermalGenerator g = build_davies_generator(p, beta);
                worst = std::max(worst, g.apply(g.gibbs()).cwiseAbs().maxCoeff());
            }
        return bound(worst, 1e-12);
    }});
    s.push_back({"zeroth.detailed_balance", "γ(−ω)/γ(ω) = e^{−βω}", [probes] {
        double worst = 0.0;
        for (const ProbeSystem& p : probes())
            for (double beta : {0.3, 1.0, 2.5})
                worst = std::max(worst, detailed_balance_residual(build_davies_generator(p, beta)));
        return bound(worst, 1e-12);
    }});
    s.push_back({"zeroth.trace_hermiticity", "evolution preserves trace and hermiticity", [probes] {
        double worst = 0.0;
        for (const ProbeSystem& p : probes()) {
            const ThermalGenerator g = build_davies_generator(p, 0.8);
            CMat rho0 = CMat::Zero(p.dim(), p.dim());
            rho0(p.dim() - 1, p.dim() - 1) = 1.0;
            for (double tau : linspace(0.0, 10.0, 21)) {
                const CMat r = evolve(g, rho0, tau);
                worst = std::max({worst, std::abs(r.trace() - 1.0), (r - r.adjoint()).cwiseAbs().maxCoeff()});
            }
        }
        return bound(worst, 1e-12);
    }});
    s.push_back({"zeroth.contraction", "trace distance to Gibbs(β) decreases monotonically", [probes] {
        bool ok = true;
        double worst = 0.0;
        for (const ProbeSystem& p : probes()) {
            CMat rho0 = CMat::Zero(p.dim(), p.dim());
            rho0(p.dim() - 1, p.dim() - 1) = 1.0;
            const ThermalizationReport t = thermalization_check(build_davies_generator(p, 1.2), rho0, 300.0);
            ok = ok && t.contractive && t.passed;
            worst = std::max(worst, t.final_distance);
        }
        return flag(ok, worst);
    }});
    s.push_back({"zeroth.qubit_decay", "qubit relaxation rate γ₀(1 + e^{−βω₀})", [] {
        const double beta = 1.0;
        CMat rho0 = CMat::Zero(2, 2);
        rho0(1, 1) = 1.0;
        const ThermalizationReport t = thermalization_check(build_davies_generator(qubit_probe(1.0), beta), rho0, 30.0);
        const double exact = 1.0 + std::exp(-beta);
        return compare_record(Level::Verify, "", t.decay_rate, exact, 0.01 * exact);
    }});
    s.push_back({"zeroth.transitivity", "different probes at one β read out the same temperature", [seed] {
        const double beta = 0.7;
        std::vector<double> fitted;
        for (const ProbeSystem& p : {random_probe(3, seed + 5), random_probe(5, seed + 6), qubit_probe(0.6)}) {
            const ThermalGenerator g = build_davies_generator(p, beta);
            fitted.push_back(fit_beta(g.energies, populations(g, stationary_state(g))));
        }
        const auto [lo, hi] = std::minmax_element(fitted.begin(), fitted.end());
        return bound(*hi - *lo, 1e-6);
    }});

    // ---- runner ------------------------------------------------------------------
    s.push_back({"runner.level_consistency", "meso π''(θ(x,t)) equals micro Cov(Q̂)/L at each pipeline point", [exec] {
        const ScenarioConfig cfg = parse_config(kDrivenFermions, "<verify:driven_fermions>", std::nullopt);
        const Report rep = run_pipeline(cfg, Stages{false, false, true, false, false}, "micro.gibbs_covariance",
            "verify", exec);
        double worst = 0.0;
        bool ok = rep.records().size() == cfg.points.size();
        for (const CheckRecord& c : rep.records()) {
            ok = ok && c.pass;
            worst = std::max(worst, c.value);
        }
        CheckRecord r = flag(ok, worst);
        r.tolerance = 1e-6;
        return r;
    }});
    s.push_back({"runner.determinism", "same config and seed give identical verdict blocks", [] {
        const ScenarioConfig cfg = parse_config(kSmallParamagnet, "<verify:small_paramagnet>", std::nullopt);
        const Stages st{true, true, false, true, false};
        const std::string a = run_pipeline(cfg, st, "", "verify", Exec::Parallel).verdict().dump();
        const std::string b = run_pipeline(cfg, st, "", "verify", Exec::Serial).verdict().dump();
        return flag(a == b);
    }});
    return s;
}

Report run_verify(const std::string& filter, std::ostream* coverage, const VerifyOptions& opt)
{
    Report rep("verify");
    std::vector<SuiteEntry> suite = verification_suite(opt);
    std::vector<const SuiteEntry*> chosen;
    for (const SuiteEntry& e : suite)
        if (filter.empty() || e.name.find(filter) != std::string::npos)
            chosen.push_back(&e);

    for (const SuiteEntry* e : chosen) {
        try {
            CheckRecord r = e->run();
            r.level = Level::Verify;
            r.name = e->name;
            r.detail["relation"] = e->relation;
            rep.add(std::move(r));
        } catch (const std::exception& ex) {
            CheckRecord r = error_record(Level::Verify, e->name, std::nullopt, std::nullopt, ex);
            r.detail["relation"] = e->relation;
            rep.add(std::move(r));
        }
    }
    if (coverage) {
        std::size_t width = 5;
        for (const SuiteEntry* e : chosen)
            width = std::max(width, e->name.size());
        char line[512];
        std::snprintf(line, sizeof line, "%-*s  %-6s  %s\n", static_cast<int>(width), "entry", "result", "relation");
        *coverage << line;
        for (const CheckRecord& r : rep.records()) {
            std::snprintf(line, sizeof line, "%-*s  %-6s  %s\n", static_cast<int>(width), r.name.c_str(),
                r.pass ? "PASS" : "FAIL", r.detail["relation"].get<std::string>().c_str());
            *coverage << line;
        }
    }
    return rep;
}

} // namespace lte
