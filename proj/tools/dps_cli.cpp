#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dps/cli.hpp"
#include "dps/errors.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw dps::ConfigError("cannot read config '" + path + "'");
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete phase-space calculus: identity audits and Klein-Gordon lattice experiments"};
    app.require_subcommand(1);

    std::string config_path, grid, out, format, equation, transform, integrator, boost_form;
    std::uint64_t seed = 0;
    double mass = 0.0, dt = 0.0, eps = 0.0;
    int steps = 0, max_axis = 0, trials = 0, every = 0;

    struct Entry {
        dps::Command command;
        const char* help;
    };
    const Entry entries[] = {
        {dps::Command::Identities, "product, splitting and summation rules on random fields"},
        {dps::Command::Gauss, "discrete Gauss theorem and conserved slice sums"},
        {dps::Command::Evolve, "Klein-Gordon time series of H, P, Q and balance residuals"},
        {dps::Command::Conserve, "energy-momentum and charge conservation audit"},
        {dps::Command::Invariance, "residual order of a Poincare variation"},
        {dps::Command::Variational, "Euler-Lagrange residuals, gradient checks and boundary ledger"},
        {dps::Command::Spectrum, "spectra of P and P^2 + Q^2 and the canonical commutator"},
    };
    for (const auto& e : entries) {
        auto* sub = app.add_subcommand(dps::to_string(e.command), e.help);
        sub->add_option("--config", config_path, "JSON config file; flags override its keys");
        sub->add_option("--seed", seed, "seed of every random field");
        sub->add_option("--grid", grid, "points per axis, e.g. 8,8,8");
        sub->add_option("--mass", mass, "field mass");
        sub->add_option("--dt", dt, "time step");
        sub->add_option("--steps", steps, "number of steps");
        sub->add_option("--eps", eps, "variation scale");
        sub->add_option("--out", out, "report path (default: $DPS_OUTPUT_DIR/<command>.<format>)");
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--max-axis", max_axis, "largest axis length of random domains");
        sub->add_option("--trials", trials, "random samples per rule");
        sub->add_option("--every", every, "steps between report rows");
        sub->add_option("--equation", equation, "kg-diffdiff, kg-difference or schroedinger");
        sub->add_option("--transform", transform, "translateK, rotAB or boostA4");
        sub->add_option("--integrator", integrator, "leapfrog or rk4");
        sub->add_option("--boost-form", boost_form, "as-printed or from-generator");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const CLI::App* sub = app.get_subcommands().front();
    auto given = [&](const char* flag) { return sub->count(flag) > 0; };
    dps::RunConfig c;
    dps::Report report;
    try {
        if (!config_path.empty()) c = dps::config_from_json(read_file(config_path), c);
        c.command = dps::command_from_string(sub->get_name());
        if (given("--seed")) c.seed = seed;
        if (given("--grid")) c.grid = dps::parse_grid(grid);
        if (given("--mass")) c.mass = mass;
        if (given("--dt")) c.dt = dt;
        if (given("--steps")) c.steps = steps;
        if (given("--eps")) c.eps = eps;
        if (given("--out")) c.out = out;
        if (given("--format")) c.format = format == "csv" ? dps::Format::Csv : dps::Format::Json;
        if (given("--max-axis")) c.max_axis = max_axis;
        if (given("--trials")) c.trials = trials;
        if (given("--every")) c.every = every;
        if (given("--equation")) c.equation = equation;
        if (given("--transform")) c.transform = transform;
        if (given("--integrator")) c.integrator = integrator;
        if (given("--boost-form")) c.boost_form = boost_form;
        report = dps::run_suite(c);
        dps::write_report(report, c.format, c.out.empty() ? dps::default_output_path(c) : c.out);
    } catch (const dps::Error& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }

    for (const auto& k : report.checks)
        std::printf("%s %-28s %.3e <= %.1e  %s\n", !k.asserted ? "INFO" : k.pass ? "PASS" : "FAIL", k.name.c_str(),
                    k.value, k.tol, k.law.c_str());
    if (!report.passed()) {
        std::cerr << report.failures_json();
        return 1;
    }
    return 0;
}
