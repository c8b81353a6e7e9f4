#include "lte/pipeline.hpp"

#include "lte/fluctuations.hpp"
#include "lte/quantum_stat.hpp"
#include "lte/zeroth_law.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>

namespace lte {

namespace {

using ojson = nlohmann::ordered_json;

struct Ctx {
    const ScenarioConfig& cfg;
    const std::string& filter;
    Exec exec;
    Model model;
    std::optional<HydroScenario> scenario;
    std::optional<Trajectory> trajectory;
};

bool wanted(const std::string& name, const std::string& filter)
{
    return filter.empty() || name.find(filter) != std::string::npos;
}

/// Runs one named check; exceptions become failing records.
template <class F>
void guarded(std::vector<CheckRecord>& out, const Ctx& ctx, Level level, const std::string& name,
    std::optional<double> x, std::optional<double> t, F&& body)
{
    if (!wanted(name, ctx.filter))
        return;
    try {
        CheckRecord r = body();
        r.level = level;
        r.name = name;
        r.x = x;
        r.t = t;
        out.push_back(std::move(r));
    } catch (const std::exception& e) {
        out.push_back(error_record(level, name, x, t, e));
    }
}

ojson mat_json(const Mat& m)
{
    ojson rows = ojson::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        ojson r = ojson::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            r.push_back(m(i, j));
        rows.push_back(std::move(r));
    }
    return rows;
}

ojson vec_json(const Vec& v)
{
    ojson a = ojson::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        a.push_back(v[i]);
    return a;
}

bool has_realization(const Model& m)
{
    return std::holds_alternative<FreeFermionChain>(m) || std::holds_alternative<Paramagnet>(m)
        || std::holds_alternative<SpinChainED>(m);
}

ControlVariable reference_control(const Model& m)
{
    if (model_dim(m) == 2)
        return ControlVariable{1.0, 0.0};
    return ControlVariable{1.0};
}

std::uint64_t point_seed(std::uint64_t seed, std::size_t point, std::uint64_t salt)
{
    return CounterRng::mix(CounterRng::mix(seed ^ salt) + point);
}

DenseRealization dense_for(const Model& m, int sites)
{
    if (const auto* ff = std::get_if<FreeFermionChain>(&m))
        return build_dense_fermion_chain(*ff, sites);
    return std::get<DenseRealization>(build_finite_model(m, sites));
}

// ---- macro ------------------------------------------------------------------------

void macro_checks(Ctx& ctx, Report& rep)
{
    const HydroScenario& sc = *ctx.scenario;
    const Trajectory& tr = *ctx.trajectory;
    std::vector<CheckRecord> out;
    const double h = sc.spacing();
    const bool closed = sc.left.kind != Boundary::Kind::Reservoir && sc.right.kind != Boundary::Kind::Reservoir;

    if (closed)
        guarded(out, ctx, Level::Macro, "macro.conservation", std::nullopt, std::nullopt, [&] {
            const Vec total0 = h * tr.states.front().q.rowwise().sum();
            double drift = 0.0;
            for (const HydroState& st : tr.states)
                drift = std::max(drift, (h * st.q.rowwise().sum() - total0).cwiseAbs().maxCoeff());
            const double tol = 1e-12 * std::max(1, tr.steps) * (1.0 + total0.cwiseAbs().maxCoeff());
            CheckRecord r = compare_record(Level::Macro, "", drift, 0.0, tol);
            r.detail["steps"] = tr.steps;
            r.detail["initial_totals"] = vec_json(total0);
            return r;
        });

    std::optional<EntropyDiagnostics> diag;
    try {
        diag = entropy_diagnostics(tr, sc);
    } catch (const std::exception& e) {
        if (wanted("macro.second_law", ctx.filter))
            out.push_back(error_record(Level::Macro, "macro.second_law", std::nullopt, std::nullopt, e));
    }
    if (diag) {
        guarded(out, ctx, Level::Macro, "macro.second_law", std::nullopt, std::nullopt, [&] {
            CheckRecord r;
            r.value = diag->min_face_production;
            r.expected = 0.0;
            r.tolerance = 1e-12;
            r.pass = diag->min_face_production >= -1e-12;
            if (closed) {
                r.pass = r.pass && diag->nondecreasing;
                r.detail["entropy_nondecreasing"] = diag->nondecreasing;
                r.detail["worst_entropy_decrease"] = diag->worst_decrease;
            }
            return r;
        });
        guarded(out, ctx, Level::Macro, "macro.entropy_balance", std::nullopt, std::nullopt,
            [&] { return compare_record(Level::Macro, "", diag->max_balance_residual, 0.0, 1e-8); });
        CsvTable t{"entropy", {"t", "S", "rate", "production", "boundary_flux", "min_face_production"}, {}};
        for (const EntropyBalance& b : diag->points)
            t.rows.push_back({b.t, b.total_entropy, b.rate, b.production, b.boundary_flux, b.min_face_production});
        rep.add_table(std::move(t));
    }

    if (sc.left.kind == Boundary::Kind::Reservoir && sc.right.kind == Boundary::Kind::Reservoir)
        guarded(out, ctx, Level::Macro, "macro.steady_state", std::nullopt, std::nullopt, [&] {
            const SteadyState ss = steady_state(sc);
            CheckRecord r = compare_record(Level::Macro, "", ss.residual, 0.0, 1e-10);
            r.pass = ss.residual < 1e-10;
            r.detail["method"] = ss.method;
            r.detail["iterations"] = ss.iterations;
            CsvTable t{"steady_state", {"x"}, {}};
            for (int k = 0; k < sc.model.dim; ++k)
                t.header.push_back("q" + std::to_string(k + 1));
            for (int k = 0; k < sc.model.dim; ++k)
                t.header.push_back("theta" + std::to_string(k + 1));
            for (int i = 0; i < sc.cells; ++i) {
                std::vector<double> row{sc.center(i)};
                for (int k = 0; k < sc.model.dim; ++k)
                    row.push_back(ss.state.q(k, i));
                for (int k = 0; k < sc.model.dim; ++k)
                    row.push_back(ss.state.theta(k, i));
                t.rows.push_back(std::move(row));
            }
            rep.add_table(std::move(t));
            return r;
        });

    for (CheckRecord& r : out)
        rep.add(std::move(r));
}

// ---- per point --------------------------------------------------------------------

struct PointResult {
    std::vector<CheckRecord> records;
    std::vector<std::vector<double>> meso_rows;
    std::vector<std::vector<double>> probe_rows;
};

void meso_checks(const Ctx& ctx, std::size_t idx, const LtePoint& p, PointResult& res)
{
    const HydroScenario& sc = *ctx.scenario;
    const ScenarioConfig& cfg = ctx.cfg;
    const std::size_t n = cfg.fluctuations.samples;
    std::shared_ptr<CovarianceField> cov;
    auto field = [&] {
        if (!cov) {
            const int cells = cfg.fluctuations.cells ? cfg.fluctuations.cells : sc.cells;
            ControlField cf{CellGrid{cells, sc.length}, Mat(sc.model.dim, cells)};
            for (int i = 0; i < cells; ++i)
                cf.theta.col(i) = interpolate_theta(*ctx.trajectory, sc, cf.grid.center(i), p.t);
            cov = std::make_shared<CovarianceField>(cf, sc.model.susceptibility);
        }
        return cov;
    };
    TestFunction f;
    f.weights = Vec::Constant(sc.model.dim, 1.0 / std::sqrt(static_cast<double>(sc.model.dim)));
    const CounterRng rng(point_seed(cfg.seed, idx, 0x6d65736fULL));

    guarded(res.records, ctx, Level::Meso, "meso.punctual_covariance", p.x, p.t, [&] {
        const auto c = field();
        const PunctualReport pr = punctual_covariance_check(*c, f, p.x, cfg.fluctuations.eps, n, rng, ctx.exec);
        const PunctualEntry& last = pr.entries.back();
        CheckRecord r;
        r.value = last.sample_variance;
        r.expected = last.target;
        r.tolerance = 3.0 * last.standard_error + pr.allowance;
        r.pass = pr.passed;
        const Vec theta = interpolate_theta(*ctx.trajectory, sc, p.x, p.t);
        r.detail["theta"] = vec_json(theta);
        r.detail["pi_hessian"] = mat_json(sc.model.susceptibility(theta));
        r.detail["samples"] = n;
        r.detail["bias_slope"] = pr.bias_slope;
        r.detail["gradient"] = pr.gradient;
        ojson rows = ojson::array();
        for (const PunctualEntry& e : pr.entries) {
            rows.push_back({{"eps", e.eps}, {"target", e.target}, {"exact_variance", e.exact_variance},
                {"sample_variance", e.sample_variance}, {"standard_error", e.standard_error},
                {"sampling_consistent", e.sampling_consistent}});
            res.meso_rows.push_back({p.x, p.t, e.eps, e.target, e.exact_variance, e.sample_variance, e.standard_error,
                e.skewness, e.excess_kurtosis});
        }
        r.detail["scales"] = std::move(rows);
        return r;
    });

    guarded(res.records, ctx, Level::Meso, "meso.characteristic_function", p.x, p.t, [&] {
        const auto c = field();
        const double eps = *std::min_element(cfg.fluctuations.eps.begin(), cfg.fluctuations.eps.end());
        const Smearing sm = discretize(ScaledTestFunction{f, p.x, eps}, c->grid());
        const std::vector<double> draws = smeared_draws(*c, sm, rng, n, ctx.exec);
        const std::complex<double> est = characteristic_estimate(draws);
        const double pred = gaussian_prediction(smeared_variance(*c, sm));
        CheckRecord r;
        r.value = std::abs(est - pred);
        r.expected = 0.0;
        r.tolerance = 3.0 / std::sqrt(static_cast<double>(n));
        r.pass = r.value <= r.tolerance;
        r.detail["estimate"] = {est.real(), est.imag()};
        r.detail["prediction"] = pred;
        r.detail["eps"] = eps;
        return r;
    });
}

void micro_checks(const Ctx& ctx, std::size_t idx, const LtePoint& p, PointResult& res)
{
    const HydroScenario& sc = *ctx.scenario;
    const QuantumConfig& qc = ctx.cfg.quantum;
    if (!has_realization(ctx.model))
        return;
    const Vec theta = interpolate_theta(*ctx.trajectory, sc, p.x, p.t);

    guarded(res.records, ctx, Level::Micro, "micro.gibbs_covariance", p.x, p.t, [&] {
        const int sites = std::holds_alternative<FreeFermionChain>(ctx.model) ? qc.covariance_sites : 8;
        const GibbsStateFactory fac(build_finite_model(ctx.model, sites), ctx.exec);
        const Mat quantum_cov = gibbs_moments(fac.at(ControlVariable(theta))).covariance;
        const Mat meso_cov = sc.model.susceptibility(theta);
        CheckRecord r = compare_record(Level::Micro, "", max_abs(quantum_cov - meso_cov), 0.0, qc.covariance_tolerance);
        r.detail["sites"] = sites;
        r.detail["quantum_covariance"] = mat_json(quantum_cov);
        r.detail["pi_hessian"] = mat_json(meso_cov);
        return r;
    });

    if (const auto* ff = std::get_if<FreeFermionChain>(&ctx.model))
        guarded(res.records, ctx, Level::Micro, "micro.local_restriction", p.x, p.t, [&] {
            const Trajectory& tr = *ctx.trajectory;
            LocalGibbsProfile prof{[&](double x) { return ControlVariable(interpolate_theta(tr, sc, x * sc.length, p.t)); },
                qc.restriction_sites, ff->hopping};
            const RestrictionReport rr = local_restriction_check(prof, qc.window, {p.x / sc.length});
            const RestrictionEntry& e = rr.entries.front();
            CheckRecord r = compare_record(Level::Micro, "", std::max(e.density_deviation, e.energy_deviation), 0.0,
                qc.restriction_tolerance);
            r.detail["window_density"] = e.density;
            r.detail["window_energy"] = e.energy;
            r.detail["reference_density"] = e.reference_density;
            r.detail["reference_energy"] = e.reference_energy;
            r.detail["sites"] = rr.sites;
            return r;
        });

    guarded(res.records, ctx, Level::Micro, "micro.kms", p.x, p.t, [&] {
        const DenseRealization dense = dense_for(ctx.model, qc.kms_sites);
        const ControlVariable ct(theta);
        const CMat h = build_effective_hamiltonian(dense, ct).cast<std::complex<double>>();
        const int d = dense.dimension();
        const std::uint64_t s = point_seed(ctx.cfg.seed, idx, 0x6b6d73ULL);
        const KMSCheckReport k = kms_check(h, ct[0], {"A", random_hermitian(d, s)}, {"B", random_hermitian(d, s + 1)},
            qc.kms_taus);
        CheckRecord r = compare_record(Level::Micro, "", k.max_residual, 0.0, qc.kms_tolerance);
        r.detail["beta"] = k.beta;
        r.detail["dimension"] = d;
        return r;
    });
}

CMat probe_initial(const std::string& kind)
{
    CMat rho = CMat::Zero(2, 2);
    if (kind == "excited")
        rho(1, 1) = 1.0;
    else if (kind == "ground")
        rho(0, 0) = 1.0;
    else
        rho(0, 0) = rho(1, 1) = 0.5;
    return rho;
}

void zeroth_checks(const Ctx& ctx, const LtePoint& p, PointResult& res)
{
    const ProbeConfig& pc = ctx.cfg.probe;
    std::optional<ProbeReport> pr;
    std::optional<std::string> err;
    auto run = [&]() -> const ProbeReport& {
        if (!pr)
            pr = local_probe_scenario(*ctx.trajectory, *ctx.scenario, p.x, p.t, qubit_probe(pc.omega0),
                probe_initial(pc.initial), pc.tau_max, flat_rate(pc.gamma0));
        return *pr;
    };
    guarded(res.records, ctx, Level::Zeroth, "zeroth.thermalization", p.x, p.t, [&] {
        const ProbeReport& r0 = run();
        const ThermalizationReport& th = r0.thermalization;
        CheckRecord r;
        r.value = th.final_distance;
        r.expected = 0.0;
        r.tolerance = pc.tolerance;
        r.pass = th.passed;
        r.detail["beta"] = r0.beta;
        r.detail["temperature"] = r0.temperature;
        r.detail["contractive"] = th.contractive;
        r.detail["decay_rate"] = th.decay_rate;
        r.detail["spectral_gap"] = th.spectral_gap;
        r.detail["hydro_model"] = r0.hydro_model;
        r.detail["probe"] = r0.probe_label;
        for (std::size_t k = 0; k < th.taus.size(); ++k)
            res.probe_rows.push_back({p.x, p.t, th.taus[k], th.distances[k]});
        return r;
    });
    guarded(res.records, ctx, Level::Zeroth, "zeroth.population_ratio", p.x, p.t, [&] {
        const ProbeReport& r0 = run();
        const Vec& pops = r0.thermalization.final_populations;
        CheckRecord r = compare_record(Level::Zeroth, "", pops[1] / pops[0], std::exp(-r0.beta * pc.omega0), 1e-6);
        r.detail["stationary_ratio"] = r0.stationary_populations[1] / r0.stationary_populations[0];
        return r;
    });
}

// ---- global quantum checks -----------------------------------------------------------------

void quantum_globals(const Ctx& ctx, Report& rep)
{
    const QuantumConfig& qc = ctx.cfg.quantum;
    std::vector<CheckRecord> out;
    if (!has_realization(ctx.model)) {
        rep.note("quantum checks skipped: model '" + model_name(ctx.model) + "' has no microscopic realization");
        return;
    }
    const ControlVariable ref = reference_control(ctx.model);
    const bool fermions = std::holds_alternative<FreeFermionChain>(ctx.model);

    guarded(out, ctx, Level::Quantum, "quantum.pi_convergence", std::nullopt, std::nullopt, [&] {
        std::vector<int> sites;
        for (int l : qc.convergence_sites)
            if (fermions || l <= 12)
                sites.push_back(l);
        if (sites.empty())
            throw Error(ErrorKind::Input, "no convergence sizes within the dense cap");
        const PiConvergenceReport pc = pi_convergence(ctx.model, ref, sites);
        CheckRecord r;
        r.value = pc.values.back();
        if (pc.has_reference) {
            r.expected = pc.reference;
            r.tolerance = 1e-6;
            r.pass = pc.monotone && pc.deviations.back() < r.tolerance;
        } else if (const auto* pm = std::get_if<Paramagnet>(&ctx.model)) {
            r.expected = std::log(2.0 * std::cosh(ref[0] * pm->splitting));
            r.tolerance = 1e-12;
            r.pass = true;
            for (double v : pc.values)
                r.pass = r.pass && std::abs(v - r.expected) <= r.tolerance;
        } else {
            r.expected = pc.extrapolated;
            r.tolerance = std::numeric_limits<double>::infinity();
            r.pass = std::all_of(pc.values.begin(), pc.values.end(), [](double v) { return std::isfinite(v); });
            r.detail["note"] = "no closed-form limit; values reported for inspection";
        }
        r.detail["sites"] = pc.sites;
        r.detail["values"] = pc.values;
        r.detail["deviations"] = pc.deviations;
        r.detail["extrapolated"] = pc.extrapolated;
        r.detail["flagged"] = pc.flagged;
        CsvTable t{"pi_convergence", {"L", "pi_L", "deviation"}, {}};
        for (std::size_t k = 0; k < pc.sites.size(); ++k)
            t.rows.push_back({double(pc.sites[k]), pc.values[k], pc.deviations.empty() ? std::nan("") : pc.deviations[k]});
        rep.add_table(std::move(t));
        return r;
    });

    guarded(out, ctx, Level::Quantum, "quantum.moment_hessian", std::nullopt, std::nullopt, [&] {
        const int sites = fermions ? qc.covariance_sites : 8;
        const GibbsStateFactory fac(build_finite_model(ctx.model, sites), ctx.exec);
        const Mat cov = gibbs_moments(fac.at(ref)).covariance;
        const Mat fd = pi_L_hessian_fd(fac, ref);
        CheckRecord r = compare_record(Level::Quantum, "", max_abs(cov - fd), 0.0, fermions ? 1e-6 : 1e-8);
        r.detail["sites"] = sites;
        r.detail["covariance"] = mat_json(cov);
        return r;
    });

    guarded(out, ctx, Level::Quantum, "quantum.kms_random", std::nullopt, std::nullopt, [&] {
        const CounterRng rng(point_seed(ctx.cfg.seed, 0, 0x4b4d5352ULL));
        double worst = 0.0;
        for (std::uint64_t k = 0; k < 50; ++k) {
            const int d = 2 + static_cast<int>(rng.bits(k, 0, 0) % 15);
            const double beta = 0.1 + 4.9 * rng.uniform(k, 1, 0);
            const double tau = -3.0 + 6.0 * rng.uniform(k, 2, 0);
            const std::uint64_t s = rng.bits(k, 3, 0);
            const CMat h = 3.0 * random_hermitian(d, s);
            const CMat a = random_hermitian(d, s + 1) + std::complex<double>(0.0, 1.0) * random_hermitian(d, s + 2);
            const CMat b = random_hermitian(d, s + 3);
            worst = std::max(worst, kms_check(h, beta, {"A", a}, {"B", b}, {tau}).max_residual);
        }
        return compare_record(Level::Quantum, "", worst, 0.0, qc.kms_tolerance);
    });

    if (fermions || std::holds_alternative<Paramagnet>(ctx.model))
        guarded(out, ctx, Level::Quantum, "quantum.completeness", std::nullopt, std::nullopt, [&] {
            CompletenessReport c;
            if (const auto* ff = std::get_if<FreeFermionChain>(&ctx.model)) {
                std::vector<ControlVariable> grid;
                for (double t1 : {0.5, 1.0, 2.0})
                    for (double t2 : {-1.0, 0.0, 1.0})
                        grid.push_back(ControlVariable{t1, t2});
                c = completeness_check(*ff, grid);
            } else {
                c = completeness_check(std::get<Paramagnet>(ctx.model),
                    {ControlVariable{0.5}, ControlVariable{1.0}, ControlVariable{2.0}});
            }
            CheckRecord r;
            r.value = c.min_hessian_eigenvalue;
            r.expected = 0.0;
            r.pass = c.injectivity == Verdict::Pass
                && (c.minimality == Verdict::Pass || c.minimality == Verdict::Vacuous);
            r.detail["injectivity"] = to_string(c.injectivity);
            r.detail["minimality"] = to_string(c.minimality);
            r.detail["witnesses"] = c.witnesses.size();
            return r;
        });

    guarded(out, ctx, Level::Quantum, "quantum.gts_variational", std::nullopt, std::nullopt, [&] {
        const DenseRealization dense = dense_for(ctx.model, std::min(qc.kms_sites, 4));
        const GibbsStateFactory fac(FiniteRealization{dense}, ctx.exec);
        std::vector<Perturbation> pert{{0.0, {}}};
        for (std::uint64_t k = 0; k < 4; ++k)
            for (double lam : {0.1, 0.5, 1.0})
                pert.push_back({lam, random_pure_state(dense.dimension(), point_seed(ctx.cfg.seed, k, 0x475453ULL))});
        const GtsReport g = gts_variational_check(fac, ref, pert);
        double min_gap = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k < g.entries.size(); ++k)
            min_gap = std::min(min_gap, g.entries[k].gap);
        CheckRecord r;
        r.value = g.entries.front().gap;
        r.expected = 0.0;
        r.tolerance = 1e-12;
        r.pass = g.holds && std::abs(g.entries.front().gap) <= 1e-12 && min_gap > 0.0;
        r.detail["pi_L"] = g.pi_L;
        r.detail["min_perturbed_gap"] = min_gap;
        return r;
    });

    for (CheckRecord& r : out)
        rep.add(std::move(r));
}

CsvTable trajectory_table(const Trajectory& tr, const HydroScenario& sc)
{
    CsvTable t{"trajectory", {"t", "x"}, {}};
    for (int k = 0; k < sc.model.dim; ++k)
        t.header.push_back("q" + std::to_string(k + 1));
    for (int k = 0; k < sc.model.dim; ++k)
        t.header.push_back("theta" + std::to_string(k + 1));
    for (const HydroState& st : tr.states)
        for (int i = 0; i < st.cells(); ++i) {
            std::vector<double> row{st.t, sc.center(i)};
            for (int k = 0; k < sc.model.dim; ++k)
                row.push_back(st.q(k, i));
            for (int k = 0; k < sc.model.dim; ++k)
                row.push_back(st.theta(k, i));
            t.rows.push_back(std::move(row));
        }
    return t;
}

} // namespace

Report run_pipeline(const ScenarioConfig& cfg, const Stages& stages, const std::string& filter,
    const std::string& command, Exec exec)
{
    Report rep(command);
    Ctx ctx{cfg, filter, exec, make_model(cfg.model), std::nullopt, std::nullopt};

    if (stages.quantum_globals)
        quantum_globals(ctx, rep);

    const bool need_points = stages.meso || stages.micro || stages.zeroth;
    if (!(stages.macro || (need_points && !cfg.points.empty())))
        return rep;

    ScenarioConfig adjusted = cfg;
    for (const LtePoint& p : cfg.points)
        adjusted.hydro.checkpoints.push_back(p.t);
    try {
        ctx.scenario = make_scenario(adjusted);
        ctx.trajectory = solve(*ctx.scenario, exec);
        if (stages.macro && wanted("macro.solve", filter)) {
            CheckRecord r;
            r.level = Level::Macro;
            r.name = "macro.solve";
            r.value = ctx.trajectory->steps;
            r.expected = ctx.trajectory->steps;
            r.pass = true;
            r.detail["rejections"] = ctx.trajectory->rejections;
            r.detail["model"] = ctx.scenario->model.name;
            rep.add(std::move(r));
        }
        if (stages.macro)
            rep.add_table(trajectory_table(*ctx.trajectory, *ctx.scenario));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Config)
            throw;
        rep.add(error_record(Level::Macro, "macro.solve", std::nullopt, std::nullopt, e));
        return rep;
    }

    if (stages.macro)
        macro_checks(ctx, rep);

    if (!need_points)
        return rep;
    const std::size_t np = cfg.points.size();
    std::vector<PointResult> results(np);
    auto bundle = [&](std::size_t k) {
        const LtePoint& p = cfg.points[k];
        if (stages.meso)
            meso_checks(ctx, k, p, results[k]);
        if (stages.micro)
            micro_checks(ctx, k, p, results[k]);
        if (stages.zeroth)
            zeroth_checks(ctx, p, results[k]);
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (long long k = 0; k < static_cast<long long>(np); ++k)
            bundle(static_cast<std::size_t>(k));
    } else {
        for (std::size_t k = 0; k < np; ++k)
            bundle(k);
    }
    if (stages.micro && !has_realization(ctx.model))
        rep.note("micro checks skipped: model '" + model_name(ctx.model) + "' has no microscopic realization");

    CsvTable meso{"meso", {"x", "t", "eps", "target", "exact_variance", "sample_variance", "standard_error", "skewness",
                              "excess_kurtosis"},
        {}};
    CsvTable probe{"probe", {"x", "t", "tau", "trace_distance"}, {}};
    for (PointResult& r : results) {
        for (CheckRecord& c : r.records)
            rep.add(std::move(c));
        meso.rows.insert(meso.rows.end(), r.meso_rows.begin(), r.meso_rows.end());
        probe.rows.insert(probe.rows.end(), r.probe_rows.begin(), r.probe_rows.end());
    }
    if (!meso.rows.empty())
        rep.add_table(std::move(meso));
    if (!probe.rows.empty())
        rep.add_table(std::move(probe));
    return rep;
}

Report run_thermo(const ScenarioConfig& cfg, const std::string& filter)
{
    Report rep("thermo");
    const Model model = make_model(cfg.model);
    Ctx ctx{cfg, filter, Exec::Parallel, model, std::nullopt, std::nullopt};
    if (std::holds_alternative<SpinChainED>(model)) {
        rep.note("spin_chain has no closed-form macroscopic thermodynamics; use the quantum command");
        return rep;
    }
    const int n = model_dim(model);
    const EntropyFunction s = model_entropy(model);
    const ReducedPressure pi = model_pressure(model);
    const ThermoConfig& tc = cfg.thermo;
    CsvTable table{"thermo", {"theta1"}, {}};
    if (n == 2)
        table.header.push_back("theta2");
    table.header.push_back("pi");
    for (int k = 0; k < n; ++k)
        table.header.push_back("q" + std::to_string(k + 1));
    table.header.push_back("s");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            table.header.push_back("pi_hess_" + std::to_string(i + 1) + std::to_string(j + 1));

    double worst_dual = 0.0, worst_pair = 0.0;
    std::vector<CheckRecord> out;
    std::size_t skipped = 0;
    for (int k = 0; k < tc.points; ++k) {
        const double t1 = tc.theta_min + (tc.theta_max - tc.theta_min) * k / (tc.points - 1);
        const ControlVariable theta = n == 2 ? ControlVariable{t1, tc.theta2} : ControlVariable{t1};
        try {
            const ClosedFormReport cf = closed_form_check(model, theta);
            const Mat ph = pi.hessian(theta);
            std::vector<double> row{t1};
            if (n == 2)
                row.push_back(tc.theta2);
            row.push_back(cf.pi);
            for (int c = 0; c < n; ++c)
                row.push_back(cf.q[c]);
            row.push_back(cf.s);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    row.push_back(ph(i, j));
            table.rows.push_back(std::move(row));
            worst_dual = std::max(worst_dual, cf.max_deviation_from_numeric);
            worst_pair = std::max(worst_pair, hessian_pair_check(s, pi, theta));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NonDifferentiable && e.kind() != ErrorKind::Singular)
                throw;
            // Coexistence points carry no Hessian pair; they are covered by the tangent set.
            ++skipped;
        }
    }
    guarded(out, ctx, Level::Thermo, "thermo.legendre_duality", std::nullopt, std::nullopt,
        [&] { return compare_record(Level::Thermo, "", worst_dual, 0.0, 1e-8); });
    guarded(out, ctx, Level::Thermo, "thermo.hessian_duality", std::nullopt, std::nullopt,
        [&] { return compare_record(Level::Thermo, "", worst_pair, 0.0, 1e-6); });
    if (skipped)
        rep.note(std::to_string(skipped) + " grid point(s) at phase coexistence excluded from the Hessian pair");

    if (std::holds_alternative<DoubleWell>(model))
        guarded(out, ctx, Level::Thermo, "thermo.tangent_set", std::nullopt, std::nullopt, [&] {
            const DoubleWell dw;
            const Tabulated1D raw = dw.raw_table(801);
            std::vector<double> grid;
            for (int k = -200; k <= 200; ++k)
                grid.push_back(0.01 * k);
            const Tabulated1D pit = discrete_conjugate(raw, grid);
            const TangentSet ts = tangent_set(pit, 0.0);
            const double spacing = raw.x[1] - raw.x[0];
            const double err = std::max(std::abs(-ts.r_max - (-1.0)), std::abs(-ts.r_min - 1.0));
            CheckRecord r = compare_record(Level::Thermo, "", err, 0.0, 2.0 * spacing);
            r.detail["pure_phase_densities"] = ts.pure_phase_densities();
            return r;
        });

    for (CheckRecord& r : out)
        rep.add(std::move(r));
    rep.add_table(std::move(table));
    return rep;
}

} // namespace lte
