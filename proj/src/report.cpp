#include "lte/report.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

namespace lte {

std::string_view to_string(Level l) noexcept
{
    switch (l) {
    case Level::Macro: return "macro";
    case Level::Meso: return "meso";
    case Level::Micro: return "micro";
    case Level::Zeroth: return "zeroth";
    case Level::Thermo: return "thermo";
    case Level::Quantum: return "quantum";
    case Level::Verify: return "verify";
    }
    return "unknown";
}

nlohmann::ordered_json CheckRecord::to_json() const
{
    nlohmann::ordered_json j;
    j["level"] = to_string(level);
    j["name"] = name;
    j["x"] = x ? nlohmann::ordered_json(*x) : nlohmann::ordered_json(nullptr);
    j["t"] = t ? nlohmann::ordered_json(*t) : nlohmann::ordered_json(nullptr);
    j["value"] = value;
    j["expected"] = expected;
    j["tolerance"] = tolerance;
    j["pass"] = pass;
    if (!error.empty())
        j["error"] = error;
    if (!detail.empty())
        j["detail"] = detail;
    return j;
}

CheckRecord error_record(Level level, std::string name, std::optional<double> x, std::optional<double> t,
    const std::exception& e)
{
    CheckRecord r;
    r.level = level;
    r.name = std::move(name);
    r.x = x;
    r.t = t;
    r.value = std::numeric_limits<double>::quiet_NaN();
    r.expected = std::numeric_limits<double>::quiet_NaN();
    r.pass = false;
    if (const auto* le = dynamic_cast<const Error*>(&e))
        r.error = std::string(to_string(le->kind())) + ": " + le->what();
    else
        r.error = std::string("internal: ") + e.what();
    return r;
}

CheckRecord compare_record(Level level, std::string name, double value, double expected, double tolerance)
{
    CheckRecord r;
    r.level = level;
    r.name = std::move(name);
    r.value = value;
    r.expected = expected;
    r.tolerance = tolerance;
    r.pass = std::abs(value - expected) <= tolerance;
    return r;
}

void CsvTable::write(const std::string& path) const
{
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorKind::Input, "cannot write " + path);
    for (std::size_t k = 0; k < header.size(); ++k)
        out << (k ? "," : "") << header[k];
    out << '\n';
    char buf[40];
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", row[k]);
            out << (k ? "," : "") << buf;
        }
        out << '\n';
    }
}

bool Report::passed() const
{
    return std::all_of(records_.begin(), records_.end(), [](const CheckRecord& r) { return r.pass; });
}

std::vector<CheckRecord> Report::sorted() const
{
    std::vector<CheckRecord> out = records_;
    auto key = [](const std::optional<double>& v) { return v ? *v : -std::numeric_limits<double>::infinity(); };
    std::stable_sort(out.begin(), out.end(), [&](const CheckRecord& a, const CheckRecord& b) {
        if (key(a.t) != key(b.t))
            return key(a.t) < key(b.t);
        if (key(a.x) != key(b.x))
            return key(a.x) < key(b.x);
        return a.name < b.name;
    });
    return out;
}

nlohmann::ordered_json Report::verdict() const
{
    nlohmann::ordered_json j;
    j["command"] = command_;
    j["passed"] = passed();
    std::size_t failures = 0;
    nlohmann::ordered_json recs = nlohmann::ordered_json::array();
    for (const CheckRecord& r : sorted()) {
        failures += r.pass ? 0 : 1;
        recs.push_back(r.to_json());
    }
    j["checks"] = records_.size();
    j["failures"] = failures;
    j["records"] = std::move(recs);
    if (!notes_.empty())
        j["notes"] = notes_;
    return j;
}

nlohmann::ordered_json Report::to_json(const ScenarioConfig* cfg) const
{
    nlohmann::ordered_json prov;
    prov["tool"] = "lte-lab";
    prov["version"] = kVersion;
    if (cfg) {
        prov["config_source"] = cfg->source;
        prov["config_hash"] = cfg->hash();
        prov["seed"] = cfg->seed;
        prov["config"] = cfg->echo();
    }
    prov["libraries"] = {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "."
                                       + std::to_string(EIGEN_MINOR_VERSION)},
        {"boost", BOOST_LIB_VERSION}, {"compiler", __VERSION__}};
    prov["threads"] = max_threads();
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    prov["timestamp"] = stamp;
    nlohmann::ordered_json j;
    j["verdict"] = verdict();
    j["provenance"] = std::move(prov);
    return j;
}

void Report::write(const std::string& dir, const ScenarioConfig* cfg) const
{
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(std::filesystem::path(dir) / "report.json");
        if (!out)
            throw Error(ErrorKind::Input, "cannot write report into " + dir);
        out << to_json(cfg).dump(2) << '\n';
    }
    for (const CsvTable& t : tables_)
        t.write((std::filesystem::path(dir) / (t.name + ".csv")).string());
}

} // namespace lte
