#include "lte/pipeline.hpp"
#include "lte/verify.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lte;

namespace {

const char* kDriven = R"(
seed = 5
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
[hydro.initial]
kind = "linear"
theta_left = [0.5]
theta_right = [1.5]
[lte]
points = [[0.25, 0.01], [0.75, 0.01]]
[fluctuations]
samples = 2000
)";

std::string config_error(const std::string& text)
{
    try {
        parse_config(text, "<test>");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("config: defaults, seed override, echo and hash")
{
    const ScenarioConfig c = parse_config(kDriven, "<test>");
    CHECK(c.seed == 5);
    CHECK(c.hydro.cells == 32);
    CHECK(c.points.size() == 2);
    CHECK(c.fluctuations.cells == 1000);
    const ScenarioConfig o = parse_config(kDriven, "<test>", 77);
    CHECK(o.seed == 77);
    CHECK(c.hash() != o.hash());
    CHECK(c.hash() == parse_config(kDriven, "<other>").hash());
    CHECK(c.echo()["hydro"]["cells"] == 32);
}

TEST_CASE("config: errors name the key")
{
    CHECK(config_error("[model]\nkind = \"paramagnet\"\n").find("seed") != std::string::npos);
    CHECK(config_error("seed = 1\n").find("model") != std::string::npos);
    CHECK(config_error("seed = 1\n[model]\nkind = \"ising\"\n").find("model.kind") != std::string::npos);
    const std::string typo = config_error("seed = 1\n[model]\nkind = \"paramagnet\"\n[hydro]\ncels = 10\n");
    CHECK(typo.find("did you mean 'hydro.cells'") != std::string::npos);
    CHECK(config_error("seed = 1\n[model]\nkind = \"paramagnet\"\n[hydro]\ncells = \"many\"\n").find("hydro.cells") != std::string::npos);
    CHECK(config_error("seed = 1\n[model]\nkind = \"free_fermion\"\n[hydro.left]\nkind = \"reservoir\"\ntheta = [1.0]\n")
              .find("hydro.left") != std::string::npos);
    CHECK(config_error("seed = 1\n[model]\nkind = \"paramagnet\"\n[fluctuations]\ncells = 64\n").find("fluctuations.eps") != std::string::npos);
    CHECK(config_error("seed = 1\n[model\n").find("<test>") != std::string::npos);
    CHECK_THROWS_AS(load_config("/nonexistent/lte.toml"), Error);
}

TEST_CASE("config: edit distance")
{
    CHECK(edit_distance("cells", "cels") == 1);
    CHECK(edit_distance("", "abc") == 3);
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
}

TEST_CASE("report ordering, verdict and files")
{
    Report r("test");
    CheckRecord late = compare_record(Level::Meso, "b", 1.0, 1.0, 0.0);
    late.t = 0.2;
    late.x = 0.1;
    CheckRecord early = compare_record(Level::Meso, "a", 1.0, 2.0, 0.5);
    early.t = 0.1;
    early.x = 0.9;
    r.add(late);
    r.add(early);
    r.add(compare_record(Level::Quantum, "global", 0.0, 0.0, 0.0));
    r.add_table({"t", {"x", "y"}, {{1.0, 2.0}}});
    CHECK_FALSE(r.passed());
    const auto s = r.sorted();
    CHECK(s[0].name == "global");
    CHECK(s[1].name == "a");
    CHECK(s[2].name == "b");
    CHECK(r.verdict()["failures"] == 1);

    const auto dir = std::filesystem::temp_directory_path() / "lte_report_test";
    std::filesystem::remove_all(dir);
    r.write(dir.string(), nullptr);
    CHECK(std::filesystem::exists(dir / "report.json"));
    std::ifstream csv(dir / "t.csv");
    std::stringstream ss;
    ss << csv.rdbuf();
    CHECK(ss.str().rfind("x,y\n", 0) == 0);
}

TEST_CASE("error records carry the kind")
{
    const CheckRecord r = error_record(Level::Micro, "m", 0.5, 0.0, Error(ErrorKind::Capacity, "too big"));
    CHECK_FALSE(r.pass);
    CHECK(r.error.find("capacity") != std::string::npos);
}

TEST_CASE("pipeline: serial and parallel verdicts are identical")
{
    const ScenarioConfig c = parse_config(kDriven, "<test>");
    const Report a = run_pipeline(c, Stages{}, "", "pipeline", Exec::Serial);
    const Report b = run_pipeline(c, Stages{}, "", "pipeline", Exec::Parallel);
    CHECK(a.passed());
    CHECK(a.verdict().dump() == b.verdict().dump());
}

TEST_CASE("pipeline: filter selects checks by substring")
{
    const ScenarioConfig c = parse_config(kDriven, "<test>");
    const Report r = run_pipeline(c, Stages{}, "zeroth.population_ratio");
    REQUIRE(r.records().size() == c.points.size());
    for (const CheckRecord& rec : r.records())
        CHECK(rec.name == "zeroth.population_ratio");
}

TEST_CASE("thermo command tabulates the Legendre pair")
{
    ScenarioConfig c = parse_config("seed = 1\n[model]\nkind = \"double_well\"\n", "<test>");
    const Report r = run_thermo(c);
    CHECK(r.passed());
    CHECK_FALSE(r.tables().empty());
}

TEST_CASE("verify: suite entries are named per module")
{
    const std::vector<SuiteEntry> s = verification_suite();
    CHECK(s.size() >= 40);
    for (const char* module : {"thermo.", "models.", "quantum.", "hydro.", "fluctuations.", "zeroth.", "runner."})
        CHECK(std::any_of(s.begin(), s.end(), [&](const SuiteEntry& e) { return e.name.rfind(module, 0) == 0; }));
}

TEST_CASE("verify: reversed flux orientation is caught by the second-law entry")
{
    VerifyOptions opt;
    CHECK(run_verify("hydro.second_law", nullptr, opt).passed());
    opt.flux_sign = -1.0;
    const Report r = run_verify("hydro.second_law", nullptr, opt);
    REQUIRE(r.records().size() == 1);
    CHECK_FALSE(r.records().front().pass);
    CHECK(r.records().front().error.empty());
    CHECK(r.records().front().value < 0.0);
}

TEST_CASE("verify: coverage table lists every selected entry")
{
    std::ostringstream out;
    const Report r = run_verify("zeroth.", &out);
    CHECK(r.passed());
    CHECK(out.str().find("zeroth.detailed_balance") != std::string::npos);
}
