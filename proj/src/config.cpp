#include "lte/config.hpp"

#include <toml.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace lte {

std::uint64_t fnv1a(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::size_t edit_distance(std::string_view a, std::string_view b)
{
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j)
        row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& msg)
{
    throw Error(ErrorKind::Config, key + ": " + msg);
}

/// Reads keys from one table and rejects whatever was not asked for.
class Section {
public:
    Section(const toml::table* t, std::string path) : t_(t), path_(std::move(path)) {}

    std::string key(std::string_view k) const { return path_.empty() ? std::string(k) : path_ + "." + std::string(k); }

    const toml::node* get(std::string_view k)
    {
        allowed_.insert(std::string(k));
        return t_ ? t_->get(k) : nullptr;
    }

    void read(std::string_view k, double& out)
    {
        if (const auto* n = get(k)) {
            auto v = n->value<double>();
            if (!v || !(n->is_floating_point() || n->is_integer()))
                fail(key(k), "expected a number");
            out = *v;
        }
    }

    void read(std::string_view k, int& out)
    {
        if (const auto* n = get(k)) {
            if (!n->is_integer())
                fail(key(k), "expected an integer");
            out = static_cast<int>(*n->value<std::int64_t>());
        }
    }

    void read(std::string_view k, std::size_t& out)
    {
        if (const auto* n = get(k)) {
            if (!n->is_integer() || *n->value<std::int64_t>() < 0)
                fail(key(k), "expected a non-negative integer");
            out = static_cast<std::size_t>(*n->value<std::int64_t>());
        }
    }

    void read(std::string_view k, std::string& out)
    {
        if (const auto* n = get(k)) {
            if (!n->is_string())
                fail(key(k), "expected a string");
            out = *n->value<std::string>();
        }
    }

    void read(std::string_view k, std::vector<double>& out)
    {
        if (const auto* n = get(k)) {
            const auto* arr = n->as_array();
            if (!arr)
                fail(key(k), "expected an array of numbers");
            out.clear();
            for (std::size_t i = 0; i < arr->size(); ++i) {
                const auto& e = *arr->get(i);
                if (!(e.is_floating_point() || e.is_integer()))
                    fail(key(k) + "[" + std::to_string(i) + "]", "expected a number");
                out.push_back(*e.value<double>());
            }
        }
    }

    void read(std::string_view k, std::vector<int>& out)
    {
        if (const auto* n = get(k)) {
            const auto* arr = n->as_array();
            if (!arr)
                fail(key(k), "expected an array of integers");
            out.clear();
            for (std::size_t i = 0; i < arr->size(); ++i) {
                if (!arr->get(i)->is_integer())
                    fail(key(k) + "[" + std::to_string(i) + "]", "expected an integer");
                out.push_back(static_cast<int>(*arr->get(i)->value<std::int64_t>()));
            }
        }
    }

    Section sub(std::string_view k)
    {
        const toml::node* n = get(k);
        if (n && !n->is_table())
            fail(key(k), "expected a table");
        return Section(n ? n->as_table() : nullptr, key(k));
    }

    /// Unknown keys are errors; the nearest known key is suggested.
    void finish() const
    {
        if (!t_)
            return;
        for (auto&& [k, v] : *t_) {
            const std::string name(k.str());
            if (allowed_.count(name))
                continue;
            std::string best;
            std::size_t dist = 3;
            for (const std::string& a : allowed_) {
                const std::size_t d = edit_distance(name, a);
                if (d < dist) {
                    dist = d;
                    best = a;
                }
            }
            std::string msg = "unknown key";
            if (!best.empty())
                msg += " (did you mean '" + key(best) + "'?)";
            fail(key(name), msg);
        }
    }

    bool present() const { return t_ != nullptr; }

private:
    const toml::table* t_;
    std::string path_;
    std::set<std::string> allowed_;
};

void expect_one_of(const std::string& key, const std::string& value, std::initializer_list<const char*> options)
{
    std::string list;
    for (const char* o : options) {
        if (value == o)
            return;
        list += list.empty() ? "" : ", ";
        list += o;
    }
    std::string best;
    std::size_t dist = 3;
    for (const char* o : options)
        if (const std::size_t d = edit_distance(value, o); d < dist) {
            dist = d;
            best = o;
        }
    fail(key, "'" + value + "' is not one of {" + list + "}" + (best.empty() ? "" : " (did you mean '" + best + "'?)"));
}

int dim_of(const ModelConfig& m)
{
    if (m.kind == "free_fermion" || m.kind == "spin_chain")
        return 2;
    return 1;
}

void check_control(const std::string& key, const std::vector<double>& theta, const ModelConfig& m)
{
    if (static_cast<int>(theta.size()) != dim_of(m))
        fail(key, "expected " + std::to_string(dim_of(m)) + " component(s) for model '" + m.kind + "'");
    for (double v : theta)
        if (!std::isfinite(v))
            fail(key, "non-finite control");
    // The double well is a formal test bed without a temperature reading.
    if (m.kind != "double_well" && !(theta[0] > 0.0))
        fail(key + "[0]", "theta_1 = 1/T must be positive (got " + std::to_string(theta[0]) + ")");
}

void positive(const std::string& key, double v)
{
    if (!(v > 0.0) || !std::isfinite(v))
        fail(key, "must be positive");
}

} // namespace

ScenarioConfig parse_config(const std::string& text, const std::string& source, std::optional<std::uint64_t> seed_override)
{
    toml::table root;
    try {
        root = toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << source << ": TOML syntax error at line " << e.source().begin.line << ": " << e.description();
        throw Error(ErrorKind::Config, os.str());
    }
    ScenarioConfig c;
    c.source = source;
    Section top(&root, "");

    if (const auto* n = top.get("seed")) {
        if (!n->is_integer() || *n->value<std::int64_t>() < 0)
            fail("seed", "expected a non-negative integer");
        c.seed = static_cast<std::uint64_t>(*n->value<std::int64_t>());
    } else if (!seed_override) {
        fail("seed", "missing; every run needs an explicit seed (or --seed)");
    }
    if (seed_override)
        c.seed = *seed_override;
    top.read("output_dir", c.output_dir);

    {
        Section s = top.sub("model");
        if (!s.present())
            fail("model", "missing table");
        s.read("kind", c.model.kind);
        expect_one_of("model.kind", c.model.kind, {"paramagnet", "quadratic", "free_fermion", "spin_chain", "double_well"});
        s.read("splitting", c.model.splitting);
        s.read("half_width", c.model.half_width);
        s.read("hopping", c.model.hopping);
        s.read("sites", c.model.sites);
        s.read("exchange", c.model.exchange);
        s.read("anisotropy", c.model.anisotropy);
        s.read("field", c.model.field);
        s.finish();
        positive("model.splitting", c.model.splitting);
        positive("model.half_width", c.model.half_width);
        positive("model.hopping", c.model.hopping);
        if (c.model.sites < 2 || c.model.sites > 12)
            fail("model.sites", "must lie in [2, 12]");
    }

    {
        Section s = top.sub("hydro");
        HydroConfig& h = c.hydro;
        s.read("cells", h.cells);
        s.read("length", h.length);
        s.read("t_end", h.t_end);
        s.read("checkpoints", h.checkpoints);
        s.read("cfl", h.cfl);
        s.read("onsager", h.onsager);
        s.read("mobility", h.mobility);
        s.read("scaling_exponent", h.scaling_exponent);
        for (auto [name, b] : {std::pair<const char*, BoundaryConfig*>{"left", &h.left}, {"right", &h.right}}) {
            Section bs = s.sub(name);
            bs.read("kind", b->kind);
            bs.read("theta", b->theta);
            bs.finish();
            const std::string key = std::string("hydro.") + name;
            expect_one_of(key + ".kind", b->kind, {"no_flux", "reservoir", "periodic"});
            if (b->kind == "reservoir")
                check_control(key + ".theta", b->theta, c.model);
            else if (!b->theta.empty())
                fail(key + ".theta", "only reservoir boundaries take a control");
        }
        {
            Section is = s.sub("initial");
            InitialConfig& i = h.initial;
            is.read("kind", i.kind);
            is.read("theta", i.theta);
            is.read("theta_left", i.theta_left);
            is.read("theta_right", i.theta_right);
            is.read("amplitude", i.amplitude);
            is.read("position", i.position);
            is.read("mode", i.mode);
            is.finish();
            expect_one_of("hydro.initial.kind", i.kind, {"uniform", "linear", "step", "sine"});
            if (i.kind == "uniform" || i.kind == "sine") {
                if (i.theta.empty())
                    i.theta = std::vector<double>(static_cast<std::size_t>(dim_of(c.model)), 1.0);
                check_control("hydro.initial.theta", i.theta, c.model);
            }
            if (i.kind == "sine") {
                if (i.amplitude.size() != i.theta.size())
                    fail("hydro.initial.amplitude", "needs one entry per control component");
                if (i.mode < 1)
                    fail("hydro.initial.mode", "must be a positive integer");
            }
            if (i.kind == "linear" || i.kind == "step") {
                check_control("hydro.initial.theta_left", i.theta_left, c.model);
                check_control("hydro.initial.theta_right", i.theta_right, c.model);
            }
            if (!(i.position > 0.0 && i.position < 1.0))
                fail("hydro.initial.position", "must lie in (0, 1) as a fraction of the domain");
        }
        s.finish();
        if (h.cells < 32 || h.cells > 4096)
            fail("hydro.cells", "must lie in [32, 4096]");
        positive("hydro.length", h.length);
        if (!(h.t_end >= 0.0))
            fail("hydro.t_end", "must be non-negative");
        for (std::size_t k = 0; k < h.checkpoints.size(); ++k)
            if (!(h.checkpoints[k] >= 0.0 && h.checkpoints[k] <= h.t_end))
                fail("hydro.checkpoints[" + std::to_string(k) + "]", "must lie in [0, t_end]");
        if (!(h.cfl > 0.0 && h.cfl <= 0.5))
            fail("hydro.cfl", "must lie in (0, 0.5]");
        expect_one_of("hydro.onsager", h.onsager, {"constant", "linear"});
        if (!(h.mobility >= 0.0))
            fail("hydro.mobility", "must be non-negative");
        positive("hydro.scaling_exponent", h.scaling_exponent);
        if ((h.left.kind == "periodic") != (h.right.kind == "periodic"))
            fail("hydro.right.kind", "periodic boundaries must be set at both ends");
    }

    {
        Section s = top.sub("lte");
        std::vector<double> flat;
        if (const auto* n = s.get("points")) {
            const auto* arr = n->as_array();
            if (!arr)
                fail("lte.points", "expected an array of [x, t] pairs");
            for (std::size_t k = 0; k < arr->size(); ++k) {
                const auto* pair = arr->get(k)->as_array();
                const std::string key = "lte.points[" + std::to_string(k) + "]";
                if (!pair || pair->size() != 2 || !pair->get(0)->value<double>() || !pair->get(1)->value<double>())
                    fail(key, "expected [x, t]");
                LtePoint p{*pair->get(0)->value<double>(), *pair->get(1)->value<double>()};
                if (!(p.x > 0.0 && p.x < c.hydro.length))
                    fail(key, "x must be interior to the hydro domain");
                if (!(p.t >= 0.0 && p.t <= c.hydro.t_end))
                    fail(key, "t must lie in [0, hydro.t_end]");
                c.points.push_back(p);
            }
        }
        s.finish();
    }

    {
        Section s = top.sub("fluctuations");
        s.read("samples", c.fluctuations.samples);
        s.read("eps", c.fluctuations.eps);
        s.read("cells", c.fluctuations.cells);
        s.finish();
        if (c.fluctuations.samples < 1000)
            fail("fluctuations.samples", "at least 1000 samples are required");
        if (c.fluctuations.eps.empty())
            fail("fluctuations.eps", "needs at least one scale");
        for (std::size_t k = 0; k < c.fluctuations.eps.size(); ++k)
            positive("fluctuations.eps[" + std::to_string(k) + "]", c.fluctuations.eps[k]);
        if (c.fluctuations.cells != 0 && (c.fluctuations.cells < 32 || c.fluctuations.cells > 100000))
            fail("fluctuations.cells", "must be 0 (hydro grid) or lie in [32, 100000]");
        const int grid = c.fluctuations.cells != 0 ? c.fluctuations.cells : c.hydro.cells;
        const double floor = 10.0 * c.hydro.length / grid;
        const double smallest = *std::min_element(c.fluctuations.eps.begin(), c.fluctuations.eps.end());
        if (smallest < floor)
            fail("fluctuations.eps", "smallest scale " + std::to_string(smallest) + " is below 10 cells (" +
                    std::to_string(floor) + "); raise fluctuations.cells");
    }

    {
        Section s = top.sub("quantum");
        QuantumConfig& q = c.quantum;
        s.read("convergence_sites", q.convergence_sites);
        s.read("restriction_sites", q.restriction_sites);
        s.read("window", q.window);
        s.read("restriction_tolerance", q.restriction_tolerance);
        s.read("covariance_sites", q.covariance_sites);
        s.read("covariance_tolerance", q.covariance_tolerance);
        s.read("kms_sites", q.kms_sites);
        s.read("kms_taus", q.kms_taus);
        s.read("kms_tolerance", q.kms_tolerance);
        s.finish();
        if (q.convergence_sites.empty() || !std::is_sorted(q.convergence_sites.begin(), q.convergence_sites.end())
            || q.convergence_sites.front() < 2)
            fail("quantum.convergence_sites", "must be a non-empty ascending list of sizes >= 2");
        if (q.window < 1 || q.window % 2 == 0)
            fail("quantum.window", "must be a positive odd number");
        if (q.restriction_sites < 10 * q.window)
            fail("quantum.restriction_sites", "must be at least 10 windows long");
        if (q.covariance_sites < 2)
            fail("quantum.covariance_sites", "must be at least 2");
        if (q.kms_sites < 2 || q.kms_sites > 6)
            fail("quantum.kms_sites", "must lie in [2, 6] (dimension <= 64)");
        positive("quantum.restriction_tolerance", q.restriction_tolerance);
        positive("quantum.covariance_tolerance", q.covariance_tolerance);
        positive("quantum.kms_tolerance", q.kms_tolerance);
    }

    {
        Section s = top.sub("probe");
        s.read("omega0", c.probe.omega0);
        s.read("gamma0", c.probe.gamma0);
        s.read("tau_max", c.probe.tau_max);
        s.read("tolerance", c.probe.tolerance);
        s.read("initial", c.probe.initial);
        s.finish();
        positive("probe.omega0", c.probe.omega0);
        positive("probe.gamma0", c.probe.gamma0);
        positive("probe.tau_max", c.probe.tau_max);
        positive("probe.tolerance", c.probe.tolerance);
        expect_one_of("probe.initial", c.probe.initial, {"excited", "ground", "mixed"});
    }

    {
        Section s = top.sub("thermo");
        s.read("theta_min", c.thermo.theta_min);
        s.read("theta_max", c.thermo.theta_max);
        s.read("theta2", c.thermo.theta2);
        s.read("points", c.thermo.points);
        s.finish();
        if (!(c.thermo.theta_max > c.thermo.theta_min))
            fail("thermo.theta_max", "must exceed thermo.theta_min");
        if (c.thermo.points < 2 || c.thermo.points > 100000)
            fail("thermo.points", "must lie in [2, 100000]");
    }

    top.finish();
    return c;
}

ScenarioConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::Config, "cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path, seed_override);
}

nlohmann::ordered_json ScenarioConfig::echo() const
{
    using J = nlohmann::ordered_json;
    J j;
    j["seed"] = seed;
    j["model"] = {{"kind", model.kind}, {"splitting", model.splitting}, {"half_width", model.half_width},
        {"hopping", model.hopping}, {"sites", model.sites}, {"exchange", model.exchange},
        {"anisotropy", model.anisotropy}, {"field", model.field}};
    auto boundary = [](const BoundaryConfig& b) { return J{{"kind", b.kind}, {"theta", b.theta}}; };
    j["hydro"] = {{"cells", hydro.cells}, {"length", hydro.length}, {"t_end", hydro.t_end},
        {"checkpoints", hydro.checkpoints}, {"cfl", hydro.cfl}, {"onsager", hydro.onsager},
        {"mobility", hydro.mobility}, {"scaling_exponent", hydro.scaling_exponent}, {"left", boundary(hydro.left)},
        {"right", boundary(hydro.right)},
        {"initial",
            {{"kind", hydro.initial.kind}, {"theta", hydro.initial.theta}, {"theta_left", hydro.initial.theta_left},
                {"theta_right", hydro.initial.theta_right}, {"amplitude", hydro.initial.amplitude},
                {"position", hydro.initial.position}, {"mode", hydro.initial.mode}}}};
    J pts = J::array();
    for (const LtePoint& p : points)
        pts.push_back({p.x, p.t});
    j["lte"] = {{"points", pts}};
    j["fluctuations"] = {{"samples", fluctuations.samples}, {"eps", fluctuations.eps}, {"cells", fluctuations.cells}};
    j["quantum"] = {{"convergence_sites", quantum.convergence_sites}, {"restriction_sites", quantum.restriction_sites},
        {"window", quantum.window}, {"restriction_tolerance", quantum.restriction_tolerance},
        {"covariance_sites", quantum.covariance_sites}, {"covariance_tolerance", quantum.covariance_tolerance},
        {"kms_sites", quantum.kms_sites}, {"kms_taus", quantum.kms_taus}, {"kms_tolerance", quantum.kms_tolerance}};
    j["probe"] = {{"omega0", probe.omega0}, {"gamma0", probe.gamma0}, {"tau_max", probe.tau_max},
        {"tolerance", probe.tolerance}, {"initial", probe.initial}};
    j["thermo"] = {{"theta_min", thermo.theta_min}, {"theta_max", thermo.theta_max}, {"theta2", thermo.theta2},
        {"points", thermo.points}};
    return j;
}

std::string ScenarioConfig::hash() const
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(fnv1a(echo().dump())));
    return buf;
}

Model make_model(const ModelConfig& m)
{
    if (m.kind == "paramagnet")
        return Paramagnet{m.splitting};
    if (m.kind == "quadratic")
        return QuadraticModel{m.half_width};
    if (m.kind == "free_fermion")
        return FreeFermionChain{m.hopping};
    if (m.kind == "spin_chain")
        return SpinChainED{m.sites, m.exchange, m.anisotropy, m.field};
    if (m.kind == "double_well")
        return DoubleWell{};
    throw Error(ErrorKind::Config, "model.kind: unknown model '" + m.kind + "'");
}

HydroScenario make_scenario(const ScenarioConfig& c)
{
    const HydroConfig& h = c.hydro;
    HydroScenario sc;
    try {
        sc.model = hydro_model(make_model(c.model));
    } catch (const Error& e) {
        throw Error(ErrorKind::Config, std::string("model.kind: ") + e.what());
    }
    const int n = sc.model.dim;
    sc.onsager = h.onsager == "linear" ? linear_onsager(n, h.mobility) : constant_onsager(n, h.mobility);
    sc.cells = h.cells;
    sc.length = h.length;
    auto boundary = [](const BoundaryConfig& b) {
        if (b.kind == "reservoir")
            return Boundary::reservoir(Vec::Map(b.theta.data(), static_cast<Eigen::Index>(b.theta.size())));
        if (b.kind == "periodic")
            return Boundary::periodic();
        return Boundary::no_flux();
    };
    sc.left = boundary(h.left);
    sc.right = boundary(h.right);
    sc.scaling_exponent = h.scaling_exponent;
    sc.t_end = h.t_end;
    sc.checkpoints = h.checkpoints;
    sc.cfl = h.cfl;

    const InitialConfig& i = h.initial;
    auto vec = [](const std::vector<double>& v) { return Vec(Vec::Map(v.data(), static_cast<Eigen::Index>(v.size()))); };
    const HydroModel model = sc.model;
    const double length = h.length;
    std::function<Vec(double)> theta0;
    if (i.kind == "uniform") {
        const Vec t = vec(i.theta);
        theta0 = [t](double) { return t; };
    } else if (i.kind == "linear") {
        const Vec a = vec(i.theta_left), b = vec(i.theta_right);
        theta0 = [a, b, length](double x) { return Vec((1.0 - x / length) * a + (x / length) * b); };
    } else if (i.kind == "step") {
        const Vec a = vec(i.theta_left), b = vec(i.theta_right);
        const double pos = i.position * length;
        theta0 = [a, b, pos](double x) { return x < pos ? a : b; };
    } else {
        const Vec t = vec(i.theta), amp = vec(i.amplitude);
        const int mode = i.mode;
        theta0 = [t, amp, mode, length](double x) {
            return Vec(t + amp * std::sin(2.0 * M_PI * mode * x / length));
        };
    }
    sc.initial_q = [model, theta0](double x) { return model.q_of(theta0(x)); };
    try {
        sc.validate();
    } catch (const Error& e) {
        throw Error(ErrorKind::Config, std::string("hydro: ") + e.what());
    }
    return sc;
}

} // namespace lte
