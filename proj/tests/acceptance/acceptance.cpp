// Acceptance criteria 1–12: one PASS/FAIL line each, exit status 1 if any fails.

#include "lte/fluctuations.hpp"
#include "lte/pipeline.hpp"
#include "lte/quantum_stat.hpp"
#include "lte/zeroth_law.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace lte;

namespace {

struct Outcome {
    bool pass = false;
    std::string summary;
};

struct Criterion {
    int id;
    const char* title;
    double budget_s;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... a)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    return v;
}

CMat excited(int dim)
{
    CMat r = CMat::Zero(dim, dim);
    r(dim - 1, dim - 1) = 1.0;
    return r;
}

// ---- 1 ------------------------------------------------------------------------
Outcome legendre_duality()
{
    double legendre = 0.0, hessian = 0.0;
    int points = 0;
    auto sweep = [&](const Model& m, const std::vector<ControlVariable>& grid) {
        const EntropyFunction s = model_entropy(m);
        const ReducedPressure pi = model_pressure(m);
        for (const ControlVariable& t : grid) {
            legendre = std::max(legendre, closed_form_check(m, t).max_deviation_from_numeric);
            hessian = std::max(hessian, hessian_pair_check(s, pi, t));
            ++points;
        }
    };
    std::vector<ControlVariable> pm, qm, ff;
    for (double t : linspace(0.2, 3.0, 20))
        pm.push_back(ControlVariable{t});
    for (double t : linspace(-2.5, 2.5, 20))
        qm.push_back(ControlVariable{t});
    const std::vector<double> t1 = linspace(0.3, 3.0, 20);
    for (int k = 0; k < 20; ++k)
        ff.push_back(ControlVariable{t1[static_cast<std::size_t>(k)], -1.0 + 0.5 * (k % 5)});
    sweep(Paramagnet{}, pm);
    sweep(QuadraticModel{}, qm);
    sweep(FreeFermionChain{}, ff);
    return {legendre < 1e-8 && hessian < 1e-6,
        fmt("%d θ points; Legendre residual %.2e (< 1e-8), Hessian-product residual %.2e (< 1e-6)", points, legendre,
            hessian)};
}

// ---- 2 ------------------------------------------------------------------------
Outcome coexistence()
{
    const Tabulated1D raw = DoubleWell{}.raw_table(801);
    const double hq = raw.x[1] - raw.x[0];
    // Two guard nodes per side: the one-sided slopes need them.
    const std::vector<double> grid = linspace(-2.02, 2.02, 405);
    const Tabulated1D pit = discrete_conjugate(raw, grid);
    const TangentSet ts = tangent_set(pit, grid[202]);
    const double err = std::max(std::abs(ts.r_min + 1.0), std::abs(ts.r_max - 1.0));
    int misses = 0, checked = 0;
    for (std::size_t k = 2; k + 2 < grid.size(); ++k) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < raw.size(); ++i)
            if (raw.y[i] - grid[k] * raw.x[i] > raw.y[best] - grid[k] * raw.x[best])
                best = i;
        ++checked;
        if (!tangent_set(pit, grid[k]).contains(-raw.x[best], 2.0 * hq))
            ++misses;
    }
    return {err < 2.0 * hq && misses == 0,
        fmt("𝒯₀ = [%.6f, %.6f], endpoint error %.2e (< %.2e); containment misses %d of %d", ts.r_min, ts.r_max, err,
            2.0 * hq, misses, checked)};
}

// ---- 3 ------------------------------------------------------------------------
Outcome pi_convergence_check()
{
    std::vector<int> sites;
    for (int l = 8; l <= 1024; l *= 2)
        sites.push_back(l);
    const PiConvergenceReport r = pi_convergence(FreeFermionChain{}, ControlVariable{1.0, 0.0}, sites);
    // (1/8) Σ_k ln(1 + e^{2cos(2πk/8)}), evaluated to 40 digits.
    const double frozen = 0.917383049284875;
    const double d8 = std::abs(r.values.front() - frozen);
    return {r.monotone && r.deviations.back() < 1e-6 && d8 < 1e-6,
        fmt("π_8 = %.12f (frozen %.12f, |Δ| %.1e); |π_1024 − π_∞| = %.1e; monotone above %.0e floor: %s",
            r.values.front(), frozen, d8, r.deviations.back(), r.resolution_floor, r.monotone ? "yes" : "no")};
}

// ---- 4 ------------------------------------------------------------------------
Outcome moment_hessian()
{
    const ControlVariable t{0.8, 0.3};
    const GibbsStateFactory ff(build_finite_model(FreeFermionChain{}, 512));
    const double dff = max_abs(gibbs_moments(ff.at(t)).covariance - pi_L_hessian_fd(ff, t));
    const GibbsStateFactory ed(build_finite_model(SpinChainED{8, 1.0, 0.5, 0.0}, 8));
    const double ded = max_abs(gibbs_moments(ed.at(t)).covariance - pi_L_hessian_fd(ed, t));
    const double var = gibbs_moments(ff.at(ControlVariable{kZeroPlus, 0.0})).covariance(1, 1);
    return {dff < 1e-6 && ded < 1e-8 && std::abs(var - 0.25) < 1e-10,
        fmt("free fermions L=512: %.2e (< 1e-6); ED L=8: %.2e (< 1e-8); Var(N)/L at θ=(0⁺,0): |%.12f − 1/4| = %.1e",
            dff, ded, var, std::abs(var - 0.25))};
}

// ---- 5 ------------------------------------------------------------------------
Outcome kms()
{
    double worst = 0.0;
    const int dims[] = {2, 4, 8, 16};
    for (std::uint64_t k = 0; k < 50; ++k) {
        const int dim = dims[k % 4];
        const CounterRng rng(1000 + k);
        const double beta = 0.1 + 2.9 * rng.uniform(0, 0, 0);
        const double tau = -2.0 + 4.0 * rng.uniform(0, 0, 1);
        const KMSCheckReport r = kms_check(random_hermitian(dim, 3 * k + 1), beta, {"A", random_hermitian(dim, 3 * k + 2)},
            {"B", random_hermitian(dim, 3 * k + 3)}, {tau});
        worst = std::max(worst, r.max_residual);
    }
    CMat h = CMat::Zero(2, 2);
    h(1, 1) = 1.0;
    CMat sx = CMat::Zero(2, 2);
    sx(0, 1) = sx(1, 0) = 1.0;
    const KmsEntry e = kms_check(h, 0.9, {"sx", sx}, {"sx", sx}, {0.0}).entries.front();
    const double two = std::max(std::abs(e.lhs - 1.0), std::abs(e.rhs - 1.0));
    return {worst < 1e-10 && two < 1e-14,
        fmt("50 random instances (dim 2–16): max residual %.2e (< 1e-10); two-level |side − 1| = %.1e (< 1e-14)", worst,
            two)};
}

// ---- 6 ------------------------------------------------------------------------
Outcome local_restriction()
{
    auto deviation = [](int sites, bool linear) {
        LocalGibbsProfile p;
        p.sites = sites;
        p.theta = [linear](double x) { return ControlVariable{linear ? 0.5 + x : 1.0, 0.0}; };
        return local_restriction_check(p, 11, {0.5}).entries.front().energy_deviation;
    };
    const double d200 = deviation(200, true), d800 = deviation(800, true);
    const double flat = deviation(400, false);
    const double ratio = d200 / d800;
    return {ratio >= 2.0 && ratio <= 6.0 && flat < 1e-10,
        fmt("energy deviation at x=0.5: L=200 %.3e, L=800 %.3e, ratio %.2f (in [2, 6]); constant profile %.1e", d200, d800,
            ratio, flat)};
}

// ---- 7 ------------------------------------------------------------------------
Outcome hydro_laws()
{
    HydroScenario box;
    box.model = hydro_model(Paramagnet{});
    box.onsager = constant_onsager(1, 1.0);
    box.cells = 64;
    box.t_end = 0.02;
    box.record_every_step = true;
    const Vec hot = box.model.q_of(Vec::Constant(1, 0.5)), cold = box.model.q_of(Vec::Constant(1, 1.5));
    box.initial_q = [hot, cold](double x) { return x < 0.5 ? hot : cold; };
    const Trajectory tr = solve(box);
    const double h = box.spacing();
    const double q0 = tr.states.front().q.sum() * h;
    double drift_per_step = 0.0;
    for (std::size_t k = 1; k < tr.states.size(); ++k)
        drift_per_step = std::max(drift_per_step, std::abs(tr.states[k].q.sum() * h - q0) / static_cast<double>(k));
    const EntropyDiagnostics d = entropy_diagnostics(tr, box);

    HydroScenario drv = box;
    drv.left = Boundary::reservoir(Vec::Constant(1, 0.5));
    drv.right = Boundary::reservoir(Vec::Constant(1, 1.5));
    const SteadyState ss = steady_state(drv);
    double lin = 0.0;
    for (int i = 0; i < drv.cells; ++i)
        lin = std::max(lin, std::abs(ss.state.theta(0, i) - (0.5 + drv.center(i))));
    return {drift_per_step < 1e-12 && d.nondecreasing && d.min_face_production >= -1e-12 && lin < 1e-6,
        fmt("%d steps: conservation drift %.1e/step; S nondecreasing: %s; min face production %.2e; steady θ vs linear %.1e",
            tr.steps, drift_per_step, d.nondecreasing ? "yes" : "no", d.min_face_production, lin)};
}

// ---- 8 ------------------------------------------------------------------------
Outcome scale_invariance()
{
    auto scenario = [](const Model& m) {
        HydroScenario sc;
        sc.model = hydro_model(m);
        sc.onsager = constant_onsager(1, 1.0);
        sc.cells = 32;
        const Vec base = sc.model.q_of(Vec::Constant(1, 1.0));
        const Vec amp = sc.model.q_of(Vec::Constant(1, 1.3)) - base;
        sc.initial_q = [base, amp](double x) { return Vec(base + amp * std::cos(M_PI * x)); };
        return sc;
    };
    const ScaleReport lin = scale_invariance_check(scenario(QuadraticModel{}), 2, 0.01);
    const ScaleReport pm = scale_invariance_check(scenario(Paramagnet{}), 2, 0.01);
    return {lin.passed && pm.passed,
        fmt("λ=2: linear %.2e, paramagnet %.2e (10·h² = %.2e)", lin.max_deviation, pm.max_deviation, lin.tolerance)};
}

// ---- 9 ------------------------------------------------------------------------
Outcome mesoscopic()
{
    const Paramagnet pm;
    const auto chi = [&](const Vec& t) { return pm.pressure().hessian(ControlVariable(t)); };
    const std::size_t n = 100000;
    const CellGrid g{2000, 1.0};
    const CovarianceField flat(uniform_field(g, Vec::Constant(1, 1.0)), chi);
    const TestFunction f{0.5, 0.2};
    const SampleMoments m = sample_moments(smeared_draws(flat, discretize(f, g), CounterRng(2024), n));
    const double closed = chi(Vec::Constant(1, 1.0))(0, 0) * 256.0 / 315.0 * f.radius;
    const double z = std::abs(m.variance - closed) / m.variance_standard_error();

    ControlField lin{g, Mat(1, g.cells)};
    for (int i = 0; i < g.cells; ++i)
        lin.theta(0, i) = 0.5 + g.center(i);
    const PunctualReport pr = punctual_covariance_check(CovarianceField(lin, chi), TestFunction{0.0, 1.0}, 0.5,
        {0.2, 0.1, 0.05, 0.025}, n, CounterRng(2025));
    bool decreasing = true;
    for (std::size_t k = 1; k < pr.entries.size(); ++k)
        decreasing = decreasing && std::abs(pr.entries[k].bias) < std::abs(pr.entries[k - 1].bias);
    const bool slope_ok = pr.bias_slope >= 1.0 && pr.bias_slope <= 4.0;
    return {z <= 3.0 && decreasing && slope_ok,
        fmt("N=%zu: uniform variance %.6f vs %.6f (%.2f SE); punctual bias decreasing: %s, log-log slope %.3f (ε² ± factor 2)",
            n, m.variance, closed, z, decreasing ? "yes" : "no", pr.bias_slope)};
}

// ---- 10 -----------------------------------------------------------------------
const char* kDrivenFermions = R"(
seed = 99
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

Outcome cross_level()
{
    const ScenarioConfig cfg = parse_config(kDrivenFermions, "<acceptance>");
    const Report r = run_pipeline(cfg, Stages{false, false, true, false, false}, "micro.gibbs_covariance");
    double worst = 0.0;
    bool ok = r.records().size() == 3;
    for (const CheckRecord& c : r.records()) {
        ok = ok && c.pass && c.tolerance <= 1e-6;
        worst = std::max(worst, c.value);
    }
    return {ok, fmt("%zu (x,t) points, L=512: max |π''(θ(x,t)) − Cov(Q̂)/L| = %.2e (< 1e-6)", r.records().size(), worst)};
}

// ---- 11 -----------------------------------------------------------------------
Outcome zeroth()
{
    const double beta = 1.0;
    const ThermalizationReport q = thermalization_check(build_davies_generator(qubit_probe(1.0), beta), excited(2), 30.0);
    const double rate = 1.0 + std::exp(-beta);
    const double rate_err = std::abs(q.decay_rate - rate) / rate;

    HydroScenario sc;
    sc.model = hydro_model(Paramagnet{});
    sc.onsager = constant_onsager(1, 1.0);
    sc.cells = 64;
    sc.left = Boundary::reservoir(Vec::Constant(1, 0.5));
    sc.right = Boundary::reservoir(Vec::Constant(1, 1.5));
    sc.initial_q = [&m = sc.model](double) { return m.q_of(Vec::Constant(1, 1.0)); };
    const SteadyState ss = steady_state(sc);
    double ratio_err = 0.0;
    for (double x : {0.25, 0.75}) {
        const ProbeReport p = local_probe_scenario(ss.state, sc, x, qubit_probe(1.0), excited(2), 40.0);
        const Vec pop = p.stationary_populations;
        ratio_err = std::max(ratio_err, std::abs(pop[1] / pop[0] - std::exp(-(0.5 + x))));
    }
    return {q.final_distance < 1e-6 && q.contractive && rate_err < 0.01 && ratio_err < 1e-6,
        fmt("qubit D(τ_max) = %.1e; decay rate %.5f vs %.5f (%.2f%%); population ratios vs e^{−0.75}, e^{−1.25}: %.1e",
            q.final_distance, q.decay_rate, rate, 100.0 * rate_err, ratio_err)};
}

// ---- 12 -----------------------------------------------------------------------
const char* kSmallScenario = R"(
seed = 31
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
points = [[0.25, 0.01], [0.5, 0.01], [0.75, 0.01]]
[fluctuations]
samples = 5000
)";

Outcome determinism()
{
    const ScenarioConfig cfg = parse_config(kSmallScenario, "<acceptance>");
    const auto t0 = std::chrono::steady_clock::now();
    const std::string a = run_pipeline(cfg, Stages{}).verdict().dump();
    const auto t1 = std::chrono::steady_clock::now();
    const std::string b = run_pipeline(cfg, Stages{}).verdict().dump();
    const std::string c = run_pipeline(cfg, Stages{}, "", "pipeline", Exec::Serial).verdict().dump();
    const double repeat = std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count() / 2.0;
    const double first = std::chrono::duration<double>(t1 - t0).count();
    return {a == b && a == c && repeat < 5.0,
        fmt("verdict blocks identical across repeat and serial runs: %s; run %.2f s, repeat %.2f s",
            a == b && a == c ? "yes" : "no", first, repeat)};
}

} // namespace

int main()
{
    apply_thread_cap_from_env();
    const std::vector<Criterion> criteria{
        {1, "Legendre duality suite", 5, legendre_duality},
        {2, "Coexistence geometry", 5, coexistence},
        {3, "π_L convergence", 10, pi_convergence_check},
        {4, "Moment–Hessian duality", 30, moment_hessian},
        {5, "KMS identity", 5, kms},
        {6, "Local restriction", 60, local_restriction},
        {7, "Hydro second law and conservation", 30, hydro_laws},
        {8, "Scale invariance", 60, scale_invariance},
        {9, "Mesoscopic LTE", 120, mesoscopic},
        {10, "Cross-level consistency", 60, cross_level},
        {11, "Local zeroth law", 10, zeroth},
        {12, "Determinism", 5, determinism},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("raised: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.budget_s;
        const bool pass = o.pass && in_time;
        failed += pass ? 0 : 1;
        std::printf("%s  %2d  %-36s %7.2f s (< %g s)  %s\n", pass ? "PASS" : "FAIL", c.id, c.title, secs, c.budget_s,
            o.summary.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu acceptance criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
