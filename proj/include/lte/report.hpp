#pragma once
/// \file
/// \brief Check records, JSON reports and CSV tables.

#include "lte/config.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace lte {

enum class Level { Macro, Meso, Micro, Zeroth, Thermo, Quantum, Verify };
std::string_view to_string(Level l) noexcept;

struct CheckRecord {
    Level level = Level::Macro;
    std::string name;
    std::optional<double> x;
    std::optional<double> t;
    double value = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string error; ///< "<kind>: message" when the check threw
    nlohmann::ordered_json detail = nlohmann::ordered_json::object();

    nlohmann::ordered_json to_json() const;
};

/// Record for a check that raised instead of producing a value.
CheckRecord error_record(Level level, std::string name, std::optional<double> x, std::optional<double> t,
    const std::exception& e);

/// |value − expected| ≤ tolerance.
CheckRecord compare_record(Level level, std::string name, double value, double expected, double tolerance);

struct CsvTable {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    void write(const std::string& path) const;
};

class Report {
public:
    explicit Report(std::string command) : command_(std::move(command)) {}

    void add(CheckRecord r) { records_.push_back(std::move(r)); }
    void add_table(CsvTable t) { tables_.push_back(std::move(t)); }
    void note(std::string s) { notes_.push_back(std::move(s)); }

    const std::vector<CheckRecord>& records() const { return records_; }
    const std::vector<CsvTable>& tables() const { return tables_; }
    bool passed() const;

    /// Records ordered by (t, x, name); global records first.
    std::vector<CheckRecord> sorted() const;
    /// Deterministic part of the report: no timestamps, no thread counts.
    nlohmann::ordered_json verdict() const;
    nlohmann::ordered_json to_json(const ScenarioConfig* cfg) const;

    /// Writes <dir>/report.json and one CSV per table.
    void write(const std::string& dir, const ScenarioConfig* cfg) const;

private:
    std::string command_;
    std::vector<CheckRecord> records_;
    std::vector<CsvTable> tables_;
    std::vector<std::string> notes_;
};

inline constexpr const char* kVersion = "1.0.0";

} // namespace lte
