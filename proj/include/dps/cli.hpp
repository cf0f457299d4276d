#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dps {

using Cell = std::variant<std::int64_t, double, std::string>;

/// One named assertion of a suite. Unasserted checks are informational.
struct Check {
    std::string name;
    std::string law;  ///< the statement under test, in words
    double value = 0.0;
    double tol = 0.0;
    bool pass = true;
    bool asserted = true;
};

/// Check that passes when value <= tol.
Check at_most(std::string name, std::string law, double value, double tol);

struct Report {
    std::string command;
    std::vector<std::pair<std::string, Cell>> params;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<Check> checks;

    bool passed() const;
    std::vector<Check> failures() const;
    /// Header plus rows; doubles use 17 significant digits.
    std::string csv() const;
    std::string json() const;
    std::string failures_json() const;
};

enum class Command { Identities, Gauss, Evolve, Conserve, Invariance, Variational, Spectrum };

std::string to_string(Command c);
Command command_from_string(const std::string& s);  ///< ConfigError on unknown names

enum class Format { Csv, Json };

struct RunConfig {
    Command command = Command::Identities;
    std::vector<int> grid;  ///< points per axis; empty picks the command's default
    double mass = 1.0;
    double dt = 1e-3;
    int steps = 1000;
    double eps = 1e-3;
    std::uint64_t seed = 1;
    std::string out;         ///< empty: <output dir>/<command>.<format>
    Format format = Format::Csv;
    int max_axis = 16;       ///< identities: largest axis length
    int trials = 100;        ///< identities, gauss: random samples per rule
    int every = 10;          ///< evolve, conserve: steps between rows
    std::string equation = "kg-diffdiff";
    std::string transform = "translate1";
    std::string integrator = "leapfrog";
    std::string boost_form = "as-printed";
};

/// Overlays the keys of a JSON object onto `base`. ConfigError on unknown keys,
/// wrong types or unparsable text.
RunConfig config_from_json(const std::string& text, RunConfig base = {});

/// Parses "8,8,8" style lists.
std::vector<int> parse_grid(const std::string& s);

/// Range checks; fills the default grid. ConfigError on violations.
RunConfig validated(RunConfig c);

/// Runs one suite. The report depends only on the configuration.
Report run_suite(const RunConfig& c);

/// $DPS_OUTPUT_DIR (or the working directory) joined with <command>.<ext>.
std::string default_output_path(const RunConfig& c);

/// Writes csv() or json() to `path`; IoError when the file cannot be written.
void write_report(const Report& r, Format f, const std::string& path);

}  // namespace dps
