#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dps/cli.hpp"
#include "dps/errors.hpp"
#include "json.hpp"

using namespace dps;

namespace {

RunConfig small(Command c) {
    RunConfig r;
    r.command = c;
    r.trials = 6;
    r.steps = 20;
    r.every = 5;
    return r;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config file keys overlay the defaults") {
    auto c = config_from_json(R"({"command": "evolve", "grid": "4,5,6", "mass": 2.5, "dt": 0.01, "steps": 7,
                                  "seed": 42, "format": "json", "boost_form": "from-generator"})");
    CHECK(c.command == Command::Evolve);
    CHECK(c.grid == std::vector<int>{4, 5, 6});
    CHECK(c.mass == 2.5);
    CHECK(c.dt == 0.01);
    CHECK(c.steps == 7);
    CHECK(c.seed == 42);
    CHECK(c.format == Format::Json);
    CHECK(c.boost_form == "from-generator");
    CHECK(c.eps == 1e-3);
    CHECK(config_from_json(R"({"grid": [3, 3]})").grid == std::vector<int>{3, 3});
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(config_from_json(R"({"gird": "8,8"})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"mass": "heavy"})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"format": "xml"})"), ConfigError);
    CHECK_THROWS_AS(config_from_json("[1, 2]"), ConfigError);
    CHECK_THROWS_AS(config_from_json("{"), ConfigError);
    CHECK_THROWS_AS(command_from_string("plot"), ConfigError);
    CHECK_THROWS_AS(parse_grid("8,x"), ConfigError);
    CHECK_THROWS_AS(parse_grid("8,8.5"), ConfigError);
    CHECK_THROWS_AS(parse_grid(""), ConfigError);

    auto bad = [](auto edit) {
        RunConfig c = small(Command::Evolve);
        edit(c);
        return c;
    };
    CHECK_THROWS_AS(validated(bad([](RunConfig& c) { c.dt = 0.0; })), ConfigError);
    CHECK_THROWS_AS(validated(bad([](RunConfig& c) { c.eps = 0.5; })), ConfigError);
    CHECK_THROWS_AS(validated(bad([](RunConfig& c) { c.steps = 0; })), ConfigError);
    CHECK_THROWS_AS(validated(bad([](RunConfig& c) { c.grid = {4, 4, 4, 4}; })), ConfigError);
    CHECK_THROWS_AS(validated(bad([](RunConfig& c) { c.transform = "boost44"; })), ConfigError);
    CHECK_THROWS_AS(validated(bad([](RunConfig& c) { c.transform = "rot21"; })), ConfigError);
    CHECK_THROWS_AS(validated(bad([](RunConfig& c) { c.equation = "dirac"; })), ConfigError);
    CHECK_THROWS_AS(validated(bad([](RunConfig& c) { c.integrator = "euler"; })), ConfigError);
    CHECK_THROWS_AS(validated(bad([](RunConfig& c) { c.max_axis = 2; })), ConfigError);
    CHECK_THROWS_AS(validated(bad([](RunConfig& c) {
                        c.command = Command::Invariance;
                        c.equation = "schroedinger";
                        c.transform = "rot13";
                    })),
                    ConfigError);
    // an unstable step is a configuration problem
    CHECK_THROWS_AS(run_suite(bad([](RunConfig& c) { c.dt = 2.0; })), ConfigError);
}

TEST_CASE("default grids per command") {
    CHECK(validated(small(Command::Evolve)).grid == std::vector<int>{8, 8, 8});
    CHECK(validated(small(Command::Spectrum)).grid == std::vector<int>{64, 60});
    RunConfig c = small(Command::Invariance);
    c.equation = "kg-difference";
    CHECK(validated(c).grid == std::vector<int>{6, 6, 5, 7});
}

TEST_CASE("report serialization") {
    Report r;
    r.command = "gauss";
    r.params = {{"seed", std::int64_t{3}}, {"eps", 0.1}};
    r.columns = {"a", "b", "c"};
    r.rows = {{std::int64_t{1}, 0.1, std::string("x")}};
    r.checks = {at_most("ok", "law", 1.0, 2.0), at_most("bad", "law", 3.0, 2.0)};
    r.checks.push_back({"info", "law", 9.0, 0.0, false, false});
    CHECK(r.csv() == "a,b,c\n1,0.10000000000000001,x\n");
    CHECK_FALSE(r.passed());
    REQUIRE(r.failures().size() == 1);
    CHECK(r.failures()[0].name == "bad");
    const auto j = nlohmann::json::parse(r.json());
    CHECK(j["command"] == "gauss");
    CHECK(j["params"]["seed"] == 3);
    CHECK(j["rows"][0][2] == "x");
    CHECK(j["passed"] == false);
    CHECK(j["checks"].size() == 3);
    const auto f = nlohmann::json::parse(r.failures_json());
    CHECK(f["failures"].size() == 1);
    r.checks.pop_back();
    r.checks.pop_back();
    CHECK(r.passed());
}

TEST_CASE("every suite runs and passes at small size") {
    for (auto cmd : {Command::Identities, Command::Gauss, Command::Spectrum, Command::Variational, Command::Evolve,
                     Command::Conserve, Command::Invariance}) {
        RunConfig c = small(cmd);
        if (cmd == Command::Evolve || cmd == Command::Conserve) c.grid = {5, 5};
        const Report r = run_suite(c);
        CAPTURE(to_string(cmd));
        CHECK(r.command == to_string(cmd));
        CHECK(!r.checks.empty());
        CHECK(!r.rows.empty());
        for (const auto& row : r.rows) CHECK(row.size() == r.columns.size());
        CHECK(r.passed());
    }
}

TEST_CASE("evolve columns follow the conservation report layout") {
    RunConfig c = small(Command::Evolve);
    c.grid = {6};
    const Report r = run_suite(c);
    CHECK(r.columns == std::vector<std::string>{"t", "H", "P1", "P2", "P3", "Q", "energy_residual", "charge_residual",
                                                "oracle_error"});
    CHECK(r.rows.size() == 5);
    CHECK(std::get<double>(r.rows.back()[0]) == doctest::Approx(0.02));
}

TEST_CASE("same configuration gives identical bytes, another seed does not") {
    RunConfig c = small(Command::Identities);
    c.seed = 11;
    const Report a = run_suite(c), b = run_suite(c);
    CHECK(a.csv() == b.csv());
    CHECK(a.json() == b.json());
    c.seed = 12;
    CHECK(run_suite(c).csv() != a.csv());
}

TEST_CASE("invariance boost rows") {
    RunConfig c = small(Command::Invariance);
    c.transform = "boost14";
    c.grid = {6, 5};
    const Report r = run_suite(c);
    CHECK(r.passed());
    REQUIRE(r.checks.size() == 2);
    CHECK_FALSE(r.checks[1].asserted);
    CHECK_FALSE(r.checks[1].pass);  // the printed block is first order
    c.equation = "schroedinger";
    const Report s = run_suite(c);
    CHECK(s.checks.size() == 1);
    CHECK(s.checks[0].value == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("write_report and the output directory") {
    const auto dir = std::filesystem::temp_directory_path() / "dps_cli_test";
    std::filesystem::create_directories(dir);
    Report r;
    r.command = "gauss";
    r.columns = {"x"};
    const auto path = (dir / "r.csv").string();
    write_report(r, Format::Csv, path);
    std::ifstream is(path);
    std::stringstream ss;
    ss << is.rdbuf();
    CHECK(ss.str() == "x\n");
    CHECK_THROWS_AS(write_report(r, Format::Csv, (dir / "missing" / "r.csv").string()), IoError);
    RunConfig c = small(Command::Gauss);
    c.format = Format::Json;
    CHECK(std::filesystem::path(default_output_path(c)).filename() == "gauss.json");
    std::filesystem::remove_all(dir);
}

}
