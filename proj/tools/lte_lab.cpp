// lte-lab: command-line front end.
//   exit 0  every check passed
//   exit 1  at least one check failed (or a module raised)
//   exit 2  configuration or usage error

#include "lte/pipeline.hpp"
#include "lte/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::string filter;
};

void print_summary(const lte::Report& rep)
{
    for (const lte::CheckRecord& r : rep.sorted()) {
        std::string where;
        if (r.x || r.t) {
            char buf[64];
            std::snprintf(buf, sizeof buf, " (x=%.4g, t=%.4g)", r.x.value_or(NAN), r.t.value_or(NAN));
            where = buf;
        }
        std::printf("%s  %s%s", r.pass ? "PASS" : "FAIL", r.name.c_str(), where.c_str());
        if (!r.error.empty())
            std::printf("  [%s]", r.error.c_str());
        else
            std::printf("  value=%.6g expected=%.6g tol=%.3g", r.value, r.expected, r.tolerance);
        std::printf("\n");
    }
    const nlohmann::ordered_json v = rep.verdict();
    if (v.contains("notes"))
        for (const auto& n : v["notes"])
            std::printf("note: %s\n", n.get<std::string>().c_str());
    std::printf("%s: %zu checks, %zu failed\n", rep.passed() ? "PASSED" : "FAILED", v["checks"].get<std::size_t>(),
        v["failures"].get<std::size_t>());
}

int run(const std::string& command, const Options& o)
{
    if (command == "verify") {
        lte::VerifyOptions vo;
        if (o.seed)
            vo.seed = *o.seed;
        const lte::Report rep = lte::run_verify(o.filter, &std::cout, vo);
        std::printf("\n");
        print_summary(rep);
        if (!o.out.empty()) {
            rep.write(o.out, nullptr);
            std::printf("report: %s/report.json\n", o.out.c_str());
        }
        return rep.passed() ? 0 : 1;
    }

    if (o.config.empty())
        throw lte::Error(lte::ErrorKind::Config, "--config is required for '" + command + "'");
    const lte::ScenarioConfig cfg = lte::load_config(o.config, o.seed);

    lte::Report rep("");
    if (command == "thermo") {
        rep = lte::run_thermo(cfg, o.filter);
    } else {
        lte::Stages st{false, false, false, false, false};
        if (command == "hydro")
            st.macro = true;
        else if (command == "fluct")
            st.meso = true;
        else if (command == "quantum")
            st.micro = st.quantum_globals = true;
        else if (command == "zeroth")
            st.zeroth = true;
        else
            st = lte::Stages{};
        rep = lte::run_pipeline(cfg, st, o.filter, command);
    }
    print_summary(rep);
    const std::string dir = o.out.empty() ? cfg.output_dir : o.out;
    rep.write(dir, &cfg);
    std::printf("report: %s/report.json\n", dir.c_str());
    return rep.passed() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    lte::apply_thread_cap_from_env();

    CLI::App app{"Local thermodynamic equilibrium laboratory"};
    app.require_subcommand(1);
    Options o;
    std::uint64_t seed = 0;
    const std::vector<std::pair<const char*, const char*>> commands{
        {"thermo", "tabulate s, π, π'' for a model and check the Legendre pair"},
        {"hydro", "solve the hydro scenario: conservation, second law, steady state"},
        {"fluct", "mesoscopic fluctuation checks at the configured points"},
        {"quantum", "π_L convergence, KMS, Gibbs covariance, local restriction"},
        {"zeroth", "thermometer probes at the configured points"},
        {"pipeline", "hydro → control field → meso/micro/probe checks"},
        {"verify", "every module's invariant suite with fixed seeds"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", o.config, "TOML scenario file");
        sub->add_option("--out", o.out, "output directory (default: output_dir from the config)");
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--filter", o.filter, "run only checks whose name contains this substring");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    CLI::App* chosen = app.get_subcommands().front();
    if (chosen->count("--seed"))
        o.seed = seed;

    try {
        return run(chosen->get_name(), o);
    } catch (const lte::Error& e) {
        std::fprintf(stderr, "lte-lab: %s\n", e.what());
        return e.kind() == lte::ErrorKind::Config ? 2 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "lte-lab: %s\n", e.what());
        return 1;
    }
}
