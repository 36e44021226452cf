#pragma once

#include <map>
#include <optional>

#include "kfield/variational.hpp"

namespace kfield {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parsed scenario file: geometry, optional force/potential/vector data,
/// initial state, grid, task and tolerance overrides.
struct Scenario {
    Chart chart;
    MetricField metric;
    ForceField force;                     // zero when absent
    Expr potential;                       // invalid when absent
    std::optional<ProlongedVector> vect;
    KVelocity initial;
    Grid grid;
    std::string task;
    std::map<std::string, double> tolerances;

    static Scenario load(const std::string& path);
};

struct Check {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct Report {
    std::string task;
    std::vector<Check> checks;
    std::vector<std::string> artifacts;
    unsigned seed = 1;

    bool ok() const;
    /// Deterministic textual body (no timestamps).
    std::string body() const;
};

/// Run a scenario; artifacts (sheet CSVs, report copy) land in out_dir.
Report run_scenario(const Scenario& sc, const std::string& out_dir, bool overwrite, unsigned seed);

}  // namespace kfield
