#include "dps/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "dps/covariance.hpp"
#include "dps/gauss.hpp"
#include "dps/noether.hpp"
#include "json.hpp"

namespace dps {

using nlohmann::ordered_json;

Check at_most(std::string name, std::string law, double value, double tol) {
    return {std::move(name), std::move(law), value, tol, value <= tol, true};
}

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string cell_text(const Cell& c) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    return std::get<std::string>(c);
}

ordered_json cell_json(const Cell& c) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
    if (const auto* d = std::get_if<double>(&c)) return *d;
    return std::get<std::string>(c);
}

ordered_json check_json(const Check& c) {
    return {{"name", c.name}, {"law", c.law}, {"value", c.value}, {"tol", c.tol}, {"pass", c.pass}, {"asserted", c.asserted}};
}

}  // namespace

bool Report::passed() const { return failures().empty(); }

std::vector<Check> Report::failures() const {
    std::vector<Check> out;
    for (const auto& c : checks)
        if (c.asserted && !c.pass) out.push_back(c);
    return out;
}

std::string Report::csv() const {
    std::ostringstream os;
    for (std::size_t k = 0; k < columns.size(); ++k) os << (k ? "," : "") << columns[k];
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << cell_text(row[k]);
        os << '\n';
    }
    return os.str();
}

std::string Report::json() const {
    ordered_json j;
    j["command"] = command;
    ordered_json p = ordered_json::object();
    for (const auto& [k, v] : params) p[k] = cell_json(v);
    j["params"] = p;
    j["columns"] = columns;
    ordered_json rs = ordered_json::array();
    for (const auto& row : rows) {
        ordered_json r = ordered_json::array();
        for (const auto& c : row) r.push_back(cell_json(c));
        rs.push_back(r);
    }
    j["rows"] = rs;
    ordered_json cs = ordered_json::array();
    for (const auto& c : checks) cs.push_back(check_json(c));
    j["checks"] = cs;
    j["passed"] = passed();
    return j.dump(2) + "\n";
}

std::string Report::failures_json() const {
    ordered_json f = ordered_json::array();
    for (const auto& c : failures()) f.push_back(check_json(c));
    return ordered_json{{"command", command}, {"failures", f}}.dump() + "\n";
}

std::string to_string(Command c) {
    switch (c) {
        case Command::Identities: return "identities";
        case Command::Gauss: return "gauss";
        case Command::Evolve: return "evolve";
        case Command::Conserve: return "conserve";
        case Command::Invariance: return "invariance";
        case Command::Variational: return "variational";
        case Command::Spectrum: return "spectrum";
    }
    return "?";
}

Command command_from_string(const std::string& s) {
    for (auto c : {Command::Identities, Command::Gauss, Command::Evolve, Command::Conserve, Command::Invariance,
                   Command::Variational, Command::Spectrum})
        if (to_string(c) == s) return c;
    throw ConfigError("unknown command '" + s + "'");
}

std::vector<int> parse_grid(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(item, &used);
            if (used != item.size()) throw ConfigError("");
            out.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError("grid entry '" + item + "' is not an integer");
        }
    }
    if (out.empty()) throw ConfigError("grid is empty");
    return out;
}

RunConfig config_from_json(const std::string& text, RunConfig c) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, v] : j.items()) {
        try {
            if (key == "command") c.command = command_from_string(v.get<std::string>());
            else if (key == "grid") c.grid = v.is_string() ? parse_grid(v.get<std::string>()) : v.get<std::vector<int>>();
            else if (key == "mass") c.mass = v.get<double>();
            else if (key == "dt") c.dt = v.get<double>();
            else if (key == "steps") c.steps = v.get<int>();
            else if (key == "eps") c.eps = v.get<double>();
            else if (key == "seed") c.seed = v.get<std::uint64_t>();
            else if (key == "out") c.out = v.get<std::string>();
            else if (key == "format") {
                const auto f = v.get<std::string>();
                if (f != "csv" && f != "json") throw ConfigError("format must be csv or json");
                c.format = f == "csv" ? Format::Csv : Format::Json;
            } else if (key == "max_axis") c.max_axis = v.get<int>();
            else if (key == "trials") c.trials = v.get<int>();
            else if (key == "every") c.every = v.get<int>();
            else if (key == "equation") c.equation = v.get<std::string>();
            else if (key == "transform") c.transform = v.get<std::string>();
            else if (key == "integrator") c.integrator = v.get<std::string>();
            else if (key == "boost_form") c.boost_form = v.get<std::string>();
            else throw ConfigError("unknown config key '" + key + "'");
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError("config key '" + key + "': " + e.what());
        }
    }
    return c;
}

namespace {

struct Transform {
    PoincareParams unit;
    bool boost = false;
    bool time = false;
};

Transform parse_transform(const std::string& s) {
    auto digit = [&](std::size_t k) {
        if (k >= s.size() || s[k] < '1' || s[k] > '4') throw ConfigError("bad transform '" + s + "'");
        return s[k] - '1';
    };
    Transform t;
    if (s.rfind("translate", 0) == 0 && s.size() == 10) {
        const int a = digit(9);
        t.unit = PoincareParams::translation(a, 1.0);
        t.time = a == 3;
    } else if (s.rfind("rot", 0) == 0 && s.size() == 5) {
        const int a = digit(3), b = digit(4);
        if (a >= b || b == 3) throw ConfigError("rotations take two spatial axes in increasing order, got '" + s + "'");
        t.unit = PoincareParams::rotation(a, b, 1.0);
    } else if (s.rfind("boost", 0) == 0 && s.size() == 7) {
        const int a = digit(5), b = digit(6);
        if (a == 3 || b != 3) throw ConfigError("boosts pair a spatial axis with axis 4, got '" + s + "'");
        t.unit = PoincareParams::rotation(a, 3, 1.0);
        t.boost = true;
    } else {
        throw ConfigError("unknown transform '" + s + "' (translateK, rotAB, boostA4)");
    }
    return t;
}

bool acts_on(const PoincareParams& p, int axis) {
    return p.eps[static_cast<std::size_t>(axis)] != 0.0 || p.eps2.row(axis).any() || p.eps2.col(axis).any();
}

Equation parse_equation(const std::string& s) {
    for (auto e : {Equation::KG_DiffDiff, Equation::KG_Difference, Equation::Schroedinger})
        if (to_string(e) == s) return e;
    throw ConfigError("unknown equation '" + s + "' (kg-diffdiff, kg-difference, schroedinger)");
}

BoostForm parse_boost_form(const std::string& s) {
    if (s == "as-printed") return BoostForm::AsPrinted;
    if (s == "from-generator") return BoostForm::FromGenerator;
    throw ConfigError("boost form must be as-printed or from-generator");
}

Integrator parse_integrator(const std::string& s) {
    if (s == "leapfrog") return Integrator::Leapfrog;
    if (s == "rk4") return Integrator::RK4;
    throw ConfigError("integrator must be leapfrog or rk4");
}

std::string grid_text(const std::vector<int>& g) {
    std::string s;
    for (std::size_t k = 0; k < g.size(); ++k) s += (k ? "," : "") + std::to_string(g[k]);
    return s;
}

void require_grid(const std::vector<int>& g, std::size_t lo, std::size_t hi, int min_points, const std::string& what) {
    if (g.size() < lo || g.size() > hi)
        throw ConfigError(what + " needs " + std::to_string(lo) + (lo == hi ? "" : " to " + std::to_string(hi)) +
                          " grid axes, got " + std::to_string(g.size()));
    for (int n : g)
        if (n < min_points) throw ConfigError(what + " needs at least " + std::to_string(min_points) + " points per axis");
}

}  // namespace

RunConfig validated(RunConfig c) {
    if (!(c.dt > 0.0)) throw ConfigError("dt must be positive");
    if (c.steps < 1) throw ConfigError("steps must be at least 1");
    if (!(c.eps > 0.0) || c.eps > 0.1) throw ConfigError("eps must lie in (0, 0.1]");
    if (!(c.mass >= 0.0)) throw ConfigError("mass must be non-negative");
    if (c.trials < 1) throw ConfigError("trials must be at least 1");
    if (c.every < 1) throw ConfigError("every must be at least 1");
    if (c.max_axis < 3 || c.max_axis > 64) throw ConfigError("max-axis must lie in [3, 64]");
    const auto eq = parse_equation(c.equation);
    parse_transform(c.transform);
    parse_integrator(c.integrator);
    parse_boost_form(c.boost_form);
    switch (c.command) {
        case Command::Evolve:
        case Command::Conserve:
            if (c.grid.empty()) c.grid = {8, 8, 8};
            require_grid(c.grid, 1, 3, 2, to_string(c.command));
            break;
        case Command::Invariance:
            if (c.grid.empty())
                c.grid = eq == Equation::KG_Difference ? std::vector<int>{6, 6, 5, 7}
                         : eq == Equation::KG_DiffDiff ? std::vector<int>{8, 8, 6}
                                                       : std::vector<int>{8, 7};
            if (eq == Equation::KG_Difference) require_grid(c.grid, 4, 4, 4, "kg-difference");
            else require_grid(c.grid, 1, 3, 4, c.equation);
            if (eq == Equation::Schroedinger && !(c.mass > 0.0)) throw ConfigError("schroedinger needs a positive mass");
            for (int a = 0; a < 3; ++a) {
                const auto tr = parse_transform(c.transform);
                const int spatial = eq == Equation::KG_Difference ? 3 : static_cast<int>(c.grid.size());
                if (a >= spatial && acts_on(tr.unit, a))
                    throw ConfigError("transform '" + c.transform + "' uses spatial axis " + std::to_string(a + 1) +
                                      " of a grid with " + std::to_string(spatial));
            }
            break;
        case Command::Spectrum:
            if (c.grid.empty()) c.grid = {64, 60};
            require_grid(c.grid, 1, 2, 12, "spectrum");
            if (c.grid.size() == 1) c.grid.push_back(c.grid[0]);
            break;
        default:
            break;
    }
    return c;
}

namespace {

// -- helpers shared by the suites ---------------------------------------------

template <class Scalar>
Scalar draw(std::mt19937_64& g) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    if constexpr (std::is_same_v<Scalar, double>) {
        return u(g);
    } else {
        const double re = u(g);
        return Scalar(re, u(g));
    }
}

template <class Scalar>
LatticeField<Scalar> random_field(const LatticeDomain& d, std::mt19937_64& g, int comps = 1) {
    return LatticeField<Scalar>::from_function(d, comps, [&](int, const Point&) { return draw<Scalar>(g); });
}

LatticeDomain random_domain(std::mt19937_64& g, int dim, int lo_max, int min_points, int max_points) {
    std::uniform_int_distribution<int> lo(0, lo_max), pts(min_points, max_points);
    std::vector<int> l(static_cast<std::size_t>(dim)), u(static_cast<std::size_t>(dim));
    for (int a = 0; a < dim; ++a) {
        l[static_cast<std::size_t>(a)] = lo(g);
        u[static_cast<std::size_t>(a)] = l[static_cast<std::size_t>(a)] + pts(g) - 1;
    }
    return make_domain(l, u);
}

Cell I(std::int64_t v) { return v; }
Cell D(double v) { return v; }
Cell S(std::string v) { return v; }

void base_params(Report& r, const RunConfig& c) {
    r.command = to_string(c.command);
    r.params = {{"seed", I(static_cast<std::int64_t>(c.seed))}};
}

// -- identities -----------------------------------------------------------------

std::string law_of(LeibnizRule r) {
    switch (r) {
        case LeibnizRule::LeibnizRight: return "D(fg) = f(n+1) Dg + g Df";
        case LeibnizRule::LeibnizLeft: return "D'(fg) = f D'g + g(n-1) D'f";
        case LeibnizRule::LeibnizSharpForward: return "D#(fg) = f(n+1) D#g + g(n-1) D#f - f(n+1) g(n-1) D#1";
        case LeibnizRule::LeibnizSharpBackward: return "D#(fg) = f(n-1) D#g + g(n+1) D#f - f(n-1) g(n+1) D#1";
        case LeibnizRule::SharpSymmetricProduct: return "D[sqrt(n) (f g(n-1) + f(n-1) g)] = sqrt2 (f D#g + g D#f)";
    }
    return "";
}

std::string law_of(MixedRule r) {
    switch (r) {
        case MixedRule::WeightedSplit: return "sqrt(n+1) D phi + sqrt(n) D' phi = sqrt2 (D# phi - phi D#1)";
        case MixedRule::WeightedSplitOfSharp: return "weighted split applied to D#_nu phi";
        case MixedRule::WeightedSquare: return "sqrt(n+1) (D phi)^2 - sqrt(n) (D' phi)^2 in weighted means";
        case MixedRule::WeightedSharpProduct: return "weighted square with D#_nu phi D#_sigma phi";
        case MixedRule::WeightedPairProduct: return "weighted square for two independent fields";
    }
    return "";
}

std::string law_of(DiffKind k) {
    switch (k) {
        case DiffKind::Right: return "sum of D f over [n1, n2] = f(n2+1) - f(n1)";
        case DiffKind::Left: return "sum of D' f over [n1, n2] = f(n2) - f(n1-1)";
        case DiffKind::WeightedMean: return "sum of D# f over [n1, n2] by weighted telescoping";
    }
    return "";
}

template <class Scalar>
double product_worst(std::mt19937_64& g, LeibnizRule rule, int trials, int max_axis) {
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const int dim = 1 + t % 3;
        auto d = random_domain(g, dim, 4, 3, dim == 1 ? max_axis : std::min(max_axis, 6));
        auto f = random_field<Scalar>(d, g), h = random_field<Scalar>(d, g);
        worst = std::max(worst, check_leibniz(f, h, t % dim, rule).relative());
    }
    return worst;
}

template <class Scalar>
double splitting_worst(std::mt19937_64& g, MixedRule rule, int trials, int max_axis) {
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const int dim = 1 + t % 3;
        auto d = random_domain(g, dim, 4, 3, dim == 1 ? max_axis : std::min(max_axis, 6));
        auto f = random_field<Scalar>(d, g);
        const int mu = t % dim, nu = (t / 3) % dim, sigma = (t / 7) % dim;
        const Residual r = rule == MixedRule::WeightedPairProduct ? check_mixed_pair(f, random_field<Scalar>(d, g), mu)
                                                                  : check_mixed(f, rule, mu, nu, sigma);
        worst = std::max(worst, r.relative());
    }
    return worst;
}

template <class Scalar>
double summation_worst(std::mt19937_64& g, DiffKind kind, int trials, int max_axis) {
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const int dim = 1 + t % 2;
        auto d = random_domain(g, dim, 5, 2, dim == 1 ? max_axis : std::min(max_axis, 8));
        auto f = random_field<Scalar>(d, g);
        const int axis = t % dim;
        std::uniform_int_distribution<int> pick(d.lower(axis), d.upper(axis));
        int a = pick(g), b = pick(g);
        if (a > b) std::swap(a, b);
        const auto r = telescope_sum(f, axis, kind, a, b);
        double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
        f.for_each_stored([&](const Point& p) { scale = std::max(scale, std::abs(f.at(p))); });
        worst = std::max(worst, std::abs(r.lhs - r.rhs) / scale);
    }
    return worst;
}

Report identities(const RunConfig& c) {
    Report r;
    base_params(r, c);
    r.params.push_back({"max_axis", I(c.max_axis)});
    r.params.push_back({"trials", I(c.trials)});
    r.columns = {"family", "rule", "scalar", "trials", "worst_relative"};
    std::mt19937_64 g(c.seed);
    const double tol = 1e-12;
    auto add = [&](const std::string& family, const std::string& name, const std::string& law, double wr, double wc) {
        r.rows.push_back({S(family), S(name), S("real"), I(c.trials), D(wr)});
        r.rows.push_back({S(family), S(name), S("complex"), I(c.trials), D(wc)});
        r.checks.push_back(at_most(family + " " + name, law, std::max(wr, wc), tol));
    };
    for (auto rule : {LeibnizRule::LeibnizRight, LeibnizRule::LeibnizLeft, LeibnizRule::LeibnizSharpForward,
                      LeibnizRule::LeibnizSharpBackward, LeibnizRule::SharpSymmetricProduct}) {
        const double wr = product_worst<double>(g, rule, c.trials, c.max_axis);
        const double wc = product_worst<Complex>(g, rule, c.trials, c.max_axis);
        add("product", to_string(rule), law_of(rule), wr, wc);
    }
    for (auto rule : {MixedRule::WeightedSplit, MixedRule::WeightedSplitOfSharp, MixedRule::WeightedSquare,
                      MixedRule::WeightedSharpProduct, MixedRule::WeightedPairProduct}) {
        const double wr = splitting_worst<double>(g, rule, c.trials, c.max_axis);
        const double wc = splitting_worst<Complex>(g, rule, c.trials, c.max_axis);
        add("splitting", to_string(rule), law_of(rule), wr, wc);
    }
    for (auto kind : {DiffKind::Right, DiffKind::Left, DiffKind::WeightedMean}) {
        const double wr = summation_worst<double>(g, kind, c.trials, c.max_axis);
        const double wc = summation_worst<Complex>(g, kind, c.trials, c.max_axis);
        add("summation", to_string(kind), law_of(kind), wr, wc);
    }
    return r;
}

// -- gauss ------------------------------------------------------------------------

Report gauss(const RunConfig& c) {
    Report r;
    base_params(r, c);
    r.params.push_back({"trials", I(c.trials)});
    r.columns = {"test", "dim", "samples", "worst_abs"};
    std::mt19937_64 g(c.seed);
    double worst = 0.0, worst_bf = 0.0;
    for (int dim = 2; dim <= 4; ++dim) {
        double wd = 0.0, wb = 0.0;
        int n = 0;
        for (int t = dim - 2; t < c.trials; t += 3, ++n) {
            auto d = random_domain(g, dim, 3, 2, 5);
            auto run = [&](const auto& j) {
                for (auto kind : {DiffKind::Right, DiffKind::Left}) {
                    const auto s = gauss_sum(j, d, kind);
                    const auto b = gauss_sum_bruteforce(j, d, kind);
                    wd = std::max(wd, std::abs(s.volume - s.boundary));
                    wb = std::max({wb, std::abs(s.volume - b.volume), std::abs(s.boundary - b.boundary)});
                }
            };
            if (t % 2 == 0) run(random_field<double>(d, g, dim));
            else run(random_field<Complex>(d, g, dim));
        }
        r.rows.push_back({S("volume-vs-boundary"), I(dim), I(n), D(wd)});
        r.rows.push_back({S("brute-force"), I(dim), I(n), D(wb)});
        worst = std::max(worst, wd);
        worst_bf = std::max(worst_bf, wb);
    }
    r.checks.push_back(at_most("gauss-theorem", "sum of Delta_mu j^mu over the hull equals the boundary sum", worst, 1e-12));
    r.checks.push_back(at_most("gauss-brute-force", "nested telescoping reproduces both sides", worst_bf, 1e-12));

    double spread = 0.0;
    for (int dim = 2; dim <= 4; ++dim) {
        double ws = 0.0;
        const int seeds = 25;
        for (int k = 0; k < seeds; ++k) {
            std::vector<int> l(static_cast<std::size_t>(dim), 1), u(static_cast<std::size_t>(dim), 4);
            l[0] = 0;
            const auto d = make_domain(l, u);
            const auto j = divergence_free_current(d, c.seed * 1000 + static_cast<std::uint64_t>(dim * 100 + k));
            const auto sums = conserved_slice_sums(j, d);
            for (double v : sums) ws = std::max(ws, std::abs(v - sums[0]));
        }
        r.rows.push_back({S("slice-sums"), I(dim), I(seeds), D(ws)});
        spread = std::max(spread, ws);
    }
    r.checks.push_back(at_most("conserved-slice-sums", "slice sums of a divergence-free current agree", spread, 1e-12));

    // open problem: the weighted-mean divergence has no boundary-only sum; report its split
    double gap = 0.0;
    for (int dim = 2; dim <= 4; ++dim) {
        const auto d = make_domain(std::vector<int>(static_cast<std::size_t>(dim), 1),
                                   std::vector<int>(static_cast<std::size_t>(dim), 4));
        const auto j = divergence_free_current(d, c.seed + static_cast<std::uint64_t>(dim));
        const auto p = sharp_gauss_probe(j, d);
        r.rows.push_back({S("sharp-probe-volume"), I(dim), I(1), D(p.volume)});
        r.rows.push_back({S("sharp-probe-faces"), I(dim), I(1), D(p.faces)});
        r.rows.push_back({S("sharp-probe-bulk"), I(dim), I(1), D(p.bulk)});
        gap = std::max(gap, std::abs(p.volume - p.faces - p.bulk));
    }
    r.checks.push_back({"sharp-gauss-probe", "sum of D#_mu j^mu against face plus bulk terms (reported only)", gap, 0.0,
                        true, false});
    return r;
}

// -- spectrum ---------------------------------------------------------------------

Report spectrum_suite(const RunConfig& c) {
    Report r;
    base_params(r, c);
    r.params.push_back({"grid", S(grid_text(c.grid))});
    const int n = c.grid[0], m = c.grid[1];
    const auto P = op_matrix(OpKind::P, n);
    const double herm = (P.entries - P.entries.adjoint()).cwiseAbs().maxCoeff();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(P.entries, false);
    const double imag = ces.eigenvalues().imag().cwiseAbs().maxCoeff();
    const auto s = spectrum(P);
    const double unit =
        (s.vectors.adjoint() * s.vectors - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
    const auto Pm = op_matrix(OpKind::P, m), Qm = op_matrix(OpKind::Q, m);
    const auto N = spectrum(Eigen::MatrixXcd(Pm.entries * Pm.entries + Qm.entries * Qm.entries));
    double number = 0.0;
    r.columns = {"k", "p_k", "number_k", "expected"};
    for (int k = 0; k < 10; ++k) {
        number = std::max(number, std::abs(N.values(k) - (2 * k + 1)));
        r.rows.push_back({I(k), D(s.values(k)), D(N.values(k)), I(2 * k + 1)});
    }
    const auto comm = commutator_check(Pm, Qm);
    r.checks.push_back(at_most("p-hermitian", "-i D# is hermitian entry by entry", herm, 0.0));
    r.checks.push_back(at_most("p-real-spectrum", "general eigensolver finds real eigenvalues", imag, 1e-12));
    r.checks.push_back(at_most("p-unitary-eigenvectors", "eigenvectors of P are orthonormal", unit, 1e-10));
    r.checks.push_back(at_most("number-spectrum", "lowest ten eigenvalues of P^2 + Q^2 are 2n + 1", number, 1e-6));
    r.checks.push_back(at_most("canonical-commutator", "[Q, P] = i I away from the truncation edge", comm.deviation, 1e-12));
    return r;
}

// -- invariance -------------------------------------------------------------------

OracleSolution lattice_mode_oracle(const LatticeDomain& d, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        std::vector<int> mode(4);
        for (int a = 0; a < 4; ++a) mode[static_cast<std::size_t>(a)] = std::uniform_int_distribution<int>(0, d.extent(a) - 1)(g);
        try {
            auto sol = kg_difference_oracle(d, mode);
            if (sol.m > 0.1) return sol;
        } catch (const RangeError&) {
        }
    }
    throw ConfigError("no lattice mode with a real mass on this grid");
}

Report invariance(const RunConfig& c) {
    Report r;
    base_params(r, c);
    const auto eq = parse_equation(c.equation);
    const auto tr = parse_transform(c.transform);
    r.params.push_back({"equation", S(c.equation)});
    r.params.push_back({"transform", S(c.transform)});
    r.params.push_back({"eps", D(c.eps)});
    r.params.push_back({"grid", S(grid_text(c.grid))});
    r.params.push_back({"mass", D(c.mass)});
    const auto d = make_grid(c.grid);
    OracleSolution sol;
    double t = 0.0;
    if (eq == Equation::KG_Difference) {
        sol = lattice_mode_oracle(d, c.seed);
    } else {
        SpectralDecomposition sd(d, c.mass);
        if (eq == Equation::KG_DiffDiff) {
            sol = kg_diffdiff_oracle(sd, ComplexState{band_limited_complex(sd, c.seed, 0.5),
                                                      band_limited_complex(sd, c.seed + 1, 0.5), 0.0, c.mass});
            t = 0.6;
        } else {
            sol = schroedinger_oracle(sd, band_limited_complex(sd, c.seed, 0.5));
            t = 0.5;
        }
    }
    r.params.push_back({"time", D(t)});
    r.columns = {"form", "eps", "residual", "floor", "base", "first_order", "ratio"};
    const bool schroedinger_boost = eq == Equation::Schroedinger && tr.boost;
    const bool kg_boost = eq != Equation::Schroedinger && tr.boost;

    auto ladder = [&](BoostForm form, const std::string& label) {
        InvarianceOptions opt;
        opt.boost = form;
        const auto lo = residual_order(sol, tr.unit, c.eps, t, opt);
        const auto hi = residual_order(sol, tr.unit, c.eps / 2.0, t, opt);
        for (const auto* x : {&lo.at_eps, &lo.at_half, &hi.at_half}) {
            const double e = x == &lo.at_eps ? c.eps : x == &lo.at_half ? c.eps / 2.0 : c.eps / 4.0;
            const double ratio = x == &lo.at_eps ? lo.ratio : x == &lo.at_half ? hi.ratio : 0.0;
            r.rows.push_back({S(label), D(e), D(x->residual), D(x->floor), D(x->base), I(x->first_order ? 1 : 0),
                              x == &hi.at_half ? Cell(S("")) : Cell(D(ratio))});
        }
        return std::make_pair(lo, hi);
    };

    if (schroedinger_boost) {
        const auto [lo, hi] = ladder(parse_boost_form(c.boost_form), c.boost_form);
        Check k{"first-order-residual", "a boost leaves an O(eps) residual in the Schroedinger equation",
                lo.ratio, 2.2, lo.ratio_in(1.8, 2.2) && hi.ratio_in(1.8, 2.2), true};
        r.checks.push_back(k);
        return r;
    }
    const BoostForm asserted_form = kg_boost ? BoostForm::FromGenerator : parse_boost_form(c.boost_form);
    const auto [lo, hi] = ladder(asserted_form, kg_boost ? "from-generator" : "-");
    const bool ok = (lo.ratio_in(3.5, 4.5) || lo.below_floor()) && (hi.ratio_in(3.5, 4.5) || hi.below_floor());
    r.checks.push_back({"second-order-residual", "the equation residual is O(eps^2) or at the rounding floor", lo.ratio,
                        4.5, ok, true});
    if (kg_boost) {
        const auto [plo, phi] = ladder(BoostForm::AsPrinted, "as-printed");
        Check info{"printed-boost-block", "residual order of the boost block as printed (reported only)", plo.ratio, 0.0,
                   true, false};
        info.pass = plo.ratio_in(3.5, 4.5) || plo.below_floor();
        r.checks.push_back(info);
    }
    return r;
}

// -- variational ------------------------------------------------------------------

template <class Scalar>
ComplexField kg_lattice_operator(const LatticeField<Scalar>& f, double m) {
    const auto& d = f.domain();
    LatticeField<Scalar> out = f * Scalar(-m * m);
    for (int mu = 0; mu < d.dim(); ++mu)
        out += diff(diff(f, mu, DiffKind::WeightedMean), mu, DiffKind::WeightedMean) * Scalar(MetricSignature::eta(mu, mu));
    if constexpr (std::is_same_v<Scalar, double>) return to_complex(out);
    else return out;
}

double interior_gap(const ComplexField& a, const ComplexField& b) {
    double m = 0.0;
    const auto& d = a.domain();
    d.for_each_point([&](const Point& p) {
        if (d.is_interior(p)) m = std::max(m, std::abs(a.at(p) - b.at(p)));
    });
    return m;
}

std::vector<Point> interior_points(const LatticeDomain& d) {
    std::vector<Point> out;
    d.for_each_point([&](const Point& p) {
        if (d.is_interior(p)) out.push_back(p);
    });
    return out;
}

Report variational(const RunConfig& c) {
    Report r;
    base_params(r, c);
    r.columns = {"test", "samples", "worst"};
    std::mt19937_64 g(c.seed);
    double grad = 0.0;
    const int real_samples = 24, complex_samples = 6;
    for (int k = 0; k < real_samples; ++k) {
        const int dim = k % 2 == 0 ? 2 : 4, comps = 1 + k % 3;
        const auto d = dim == 2 ? make_domain({1, 0}, {6, 5}) : make_domain({0, 1, 0, 2}, {3, 4, 3, 5});
        const auto L = QuadraticLagrangian::random({comps, dim, false}, g());
        grad = std::max(grad, action_gradient_check(L, random_field<double>(d, g, comps), interior_points(d), 1e-5).deviation);
    }
    r.rows.push_back({S("gradient-real"), I(real_samples), D(grad)});
    double cgrad = 0.0;
    for (int k = 0; k < complex_samples; ++k) {
        const auto d = make_domain({0, 2}, {4, 6});
        const auto L = QuadraticLagrangian::random({2, 2, true}, g());
        const auto f = random_field<Complex>(d, g, 2);
        for (auto form : {ELForm::Plain, ELForm::Conjugate})
            cgrad = std::max(cgrad, action_gradient_check(L, f, interior_points(d), 1e-5, form).deviation);
    }
    r.rows.push_back({S("gradient-complex"), I(complex_samples), D(cgrad)});
    r.checks.push_back(at_most("el-vs-action-gradient", "EL residual equals the central-difference action gradient",
                               std::max(grad, cgrad), 1e-7));

    const auto hull = make_domain({1, 2}, {5, 6});
    const auto pts = boundary_indicator_points(hull);
    double ledger = 0.0;
    std::int64_t misses = 0, audits = 0;
    for (int k = 0; k < 5; ++k) {
        const auto L = QuadraticLagrangian::random({1, 2, false}, g());
        const auto f = random_field<double>(hull, g);
        for (const auto& p : pts) {
            RealField h(hull, 1);
            h.ref(0, p) = 1.0;
            const auto a = boundary_term_audit(L, f, h);
            ledger = std::max(ledger, std::abs(a.direct - a.ledger));
            const auto pr = boundary_term_audit(L, f, h, LedgerVariant::AsPrinted);
            if (std::abs(pr.direct - pr.ledger) > 1e-9) ++misses;
            ++audits;
        }
    }
    r.rows.push_back({S("boundary-ledger"), I(audits), D(ledger)});
    r.rows.push_back({S("printed-ledger-misses"), I(audits), D(static_cast<double>(misses))});
    r.checks.push_back(at_most("boundary-ledger", "boundary ledger equals the direct boundary variation on a 5x5 hull",
                               ledger, 1e-9));

    double kg = 0.0;
    for (int dim = 1; dim <= 4; ++dim) {
        const auto d = make_grid(std::vector<int>(static_cast<std::size_t>(dim), dim == 4 ? 5 : 7));
        const auto f = random_field<double>(d, g);
        kg = std::max(kg, interior_gap(euler_lagrange_residual(QuadraticLagrangian::klein_gordon(dim, c.mass), f),
                                       kg_lattice_operator(f, c.mass)));
        const auto z = random_field<Complex>(d, g);
        kg = std::max(kg, interior_gap(euler_lagrange_residual(QuadraticLagrangian::klein_gordon_complex(dim, c.mass), z,
                                                               ELForm::Conjugate),
                                       kg_lattice_operator(z, c.mass)));
    }
    r.rows.push_back({S("kg-el-operator"), I(8), D(kg)});
    r.checks.push_back(at_most("kg-el-operator", "KG Lagrangian EL residual equals the lattice KG operator", kg, 1e-12));
    return r;
}

// -- evolve / conserve --------------------------------------------------------------

template <class Scalar>
LatticeField<Scalar> acceleration(const LatticeField<Scalar>& phi, double m) {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    return LatticeField<Scalar>::unflatten(phi.domain(), 1, kg_operator(phi.domain(), m, Vec(phi.hull_values())));
}

struct Observables {
    double H = 0.0;
    std::array<double, 3> P{};
    double Q = 0.0;
    double energy_residual = 0.0;
    double charge_residual = 0.0;
};

template <class Scalar>
Observables observe(const EvolutionState<Scalar>& s) {
    const int dim = s.phi.domain().dim();
    Observables o;
    const auto L = std::is_same_v<Scalar, double> ? QuadraticLagrangian::klein_gordon(dim + 1, s.m, true)
                                                  : QuadraticLagrangian::klein_gordon_complex(dim + 1, s.m, true);
    const auto acc = acceleration(s.phi, s.m);
    const auto T = stress_tensor(L, s.phi, s.pi);
    const auto cons = conservation_residual(T, stress_tensor_rate(L, s.phi, s.pi, acc));
    o.energy_residual = cons.max_abs[static_cast<std::size_t>(dim)];
    if constexpr (std::is_same_v<Scalar, Complex>) {
        const auto j = charge_current(L, s.phi, s.pi);
        const auto div = current_divergence(j, charge_current_rate(L, s.phi, s.pi, acc));
        o.charge_residual = div.hull_values().cwiseAbs().maxCoeff();
        const Complex q = total_charge(L, s.phi, s.pi);
        const auto tot = totals(T, &j, q);
        o.Q = q.real();
        o.H = tot.H.real();
        for (int a = 0; a < dim; ++a) o.P[static_cast<std::size_t>(a)] = tot.P[static_cast<std::size_t>(a)].real();
    } else {
        const auto tot = totals(T);
        o.H = tot.H.real();
        for (int a = 0; a < dim; ++a) o.P[static_cast<std::size_t>(a)] = tot.P[static_cast<std::size_t>(a)].real();
    }
    return o;
}

void evolution_params(Report& r, const RunConfig& c) {
    r.params.push_back({"grid", S(grid_text(c.grid))});
    r.params.push_back({"mass", D(c.mass)});
    r.params.push_back({"dt", D(c.dt)});
    r.params.push_back({"steps", I(c.steps)});
    r.params.push_back({"every", I(c.every)});
}

template <class Scalar>
void guard_stability(const KleinGordonStepper<Scalar>& st, double dt, Integrator integ) {
    try {
        st.check_stable(dt, integ);
    } catch (const StabilityViolation& e) {
        throw ConfigError(e.what());
    }
}

double relative(double v, double ref) { return ref != 0.0 ? std::abs(v - ref) / std::abs(ref) : std::abs(v); }

Report evolve(const RunConfig& c) {
    Report r;
    base_params(r, c);
    evolution_params(r, c);
    r.params.push_back({"integrator", S(c.integrator)});
    const auto integ = parse_integrator(c.integrator);
    const auto d = make_grid(c.grid);
    SpectralDecomposition sd(d, c.mass);
    const ComplexState s0{band_limited_complex(sd, c.seed), band_limited_complex(sd, c.seed + 1), 0.0, c.mass};
    KleinGordonStepper<Complex> st(d, c.mass);
    guard_stability(st, c.dt, integ);
    r.columns = {"t", "H", "P1", "P2", "P3", "Q", "energy_residual", "charge_residual", "oracle_error"};
    ComplexState s = s0;
    double h0 = 0.0, q0 = 0.0, dh = 0.0, dq = 0.0, err = 0.0, res_e = 0.0, res_q = 0.0;
    for (int k = 0; k <= c.steps; ++k) {
        if (k > 0) s = st.step(s, c.dt, integ);
        if (k % c.every != 0 && k != c.steps) continue;
        s.t = k * c.dt;  // keep the clock exact
        const auto o = observe(s);
        if (k == 0) {
            h0 = o.H;
            q0 = o.Q;
        }
        dh = std::max(dh, relative(o.H, h0));
        dq = std::max(dq, relative(o.Q, q0));
        res_e = std::max(res_e, o.energy_residual);
        res_q = std::max(res_q, o.charge_residual);
        const auto x = spectral_solve(s0, s.t, sd);
        err = (s.phi.flatten() - x.phi.flatten()).norm();
        r.rows.push_back({D(s.t), D(o.H), D(o.P[0]), D(o.P[1]), D(o.P[2]), D(o.Q), D(o.energy_residual),
                          D(o.charge_residual), D(err)});
    }
    r.checks.push_back(at_most("energy-drift", "relative change of H along the run", dh, 1e-6));
    r.checks.push_back(at_most("charge-drift", "relative change of Q along the run", dq, 1e-6));
    r.checks.push_back(at_most("energy-balance", "Delta_b T^b_4 + d/dt T^4_4 = 0 with the equation's acceleration", res_e, 1e-8));
    r.checks.push_back(at_most("charge-balance", "Delta_b j^b + d/dt j^4 = 0 with the equation's acceleration", res_q, 1e-8));
    r.checks.push_back(at_most("oracle-error", "L2 distance to the spectral solution at the last step", err, 1e-6));
    return r;
}

Report conserve(const RunConfig& c) {
    Report r;
    base_params(r, c);
    evolution_params(r, c);
    const auto d = make_grid(c.grid);
    SpectralDecomposition sd(d, c.mass);
    const RealState r0{band_limited_real(sd, c.seed), band_limited_real(sd, c.seed + 1), 0.0, c.mass};
    const ComplexState c0{band_limited_complex(sd, c.seed + 2), band_limited_complex(sd, c.seed + 3), 0.0, c.mass};
    KleinGordonStepper<double> rs(d, c.mass);
    KleinGordonStepper<Complex> cs(d, c.mass);
    guard_stability(cs, c.dt, Integrator::Leapfrog);
    r.columns = {"t", "H", "P1", "P2", "P3", "Q", "energy_residual", "charge_residual"};
    RealState x = r0;
    ComplexState z = c0;
    double h0 = 0.0, q0 = 0.0, dh = 0.0, dq = 0.0, res_e = 0.0, res_q = 0.0;
    for (int k = 0; k <= c.steps; ++k) {
        if (k > 0) {
            x = rs.leapfrog(x, c.dt);
            z = cs.leapfrog(z, c.dt);
        }
        if (k % c.every != 0 && k != c.steps) continue;
        const double t = k * c.dt;
        x.t = z.t = t;
        const auto ox = observe(x), oz = observe(z);
        // residual norms at the exact solution with its own time derivatives
        const auto ex = observe(spectral_solve(r0, t, sd));
        const auto ez = observe(spectral_solve(c0, t, sd));
        if (k == 0) {
            h0 = ox.H;
            q0 = oz.Q;
        }
        dh = std::max(dh, relative(ox.H, h0));
        dq = std::max(dq, relative(oz.Q, q0));
        const double e_res = std::max(ex.energy_residual, ez.energy_residual);
        res_e = std::max(res_e, e_res);
        res_q = std::max(res_q, ez.charge_residual);
        r.rows.push_back({D(t), D(ox.H), D(ox.P[0]), D(ox.P[1]), D(ox.P[2]), D(oz.Q), D(e_res), D(ez.charge_residual)});
    }
    r.checks.push_back(at_most("energy-drift", "relative change of H (real field, leapfrog)", dh, 1e-6));
    r.checks.push_back(at_most("charge-drift", "relative change of Q (complex field, leapfrog)", dq, 1e-6));
    r.checks.push_back(at_most("energy-balance", "Delta_b T^b_4 + d/dt T^4_4 = 0 pointwise on the oracle", res_e, 1e-8));
    r.checks.push_back(at_most("charge-balance", "Delta_b j^b + d/dt j^4 = 0 pointwise on the oracle", res_q, 1e-8));
    return r;
}

}  // namespace

Report run_suite(const RunConfig& config) {
    const RunConfig c = validated(config);
    switch (c.command) {
        case Command::Identities: return identities(c);
        case Command::Gauss: return gauss(c);
        case Command::Evolve: return evolve(c);
        case Command::Conserve: return conserve(c);
        case Command::Invariance: return invariance(c);
        case Command::Variational: return variational(c);
        case Command::Spectrum: return spectrum_suite(c);
    }
    throw ConfigError("unknown command");
}

std::string default_output_path(const RunConfig& c) {
    const char* env = std::getenv("DPS_OUTPUT_DIR");
    const std::filesystem::path dir = env && *env ? env : ".";
    return (dir / (to_string(c.command) + (c.format == Format::Csv ? ".csv" : ".json"))).string();
}

void write_report(const Report& r, Format f, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    os << (f == Format::Csv ? r.csv() : r.json());
    if (!os) throw IoError("writing '" + path + "' failed");
}

}  // namespace dps
