// One PASS/FAIL line per acceptance criterion. Exit status 1 when any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "dps/cli.hpp"
#include "dps/evolution.hpp"

using namespace dps;

namespace {

struct Timed {
    Report report;
    double seconds = 0.0;
};

Timed timed_run(const RunConfig& c) {
    const auto t0 = std::chrono::steady_clock::now();
    Timed t{run_suite(c)};
    t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return t;
}

RunConfig config(Command cmd) {
    RunConfig c;
    c.command = cmd;
    return c;
}

const Check& check(const Report& r, const std::string& name) {
    for (const auto& k : r.checks)
        if (k.name == name) return k;
    throw std::runtime_error("report " + r.command + " has no check " + name);
}

struct Line {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        detail += (detail.empty() ? "" : "; ") + what + (ok ? "" : " [miss]");
    }
    void require(const Check& k) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s %.2e <= %.0e", k.name.c_str(), k.value, k.tol);
        require(k.pass, buf);
    }
    void runtime(double s, double limit) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2f s <= %.0f s", s, limit);
        require(s <= limit, buf);
    }
};

double oracle_distance(const ComplexState& a, const ComplexState& b) { return (a.phi.flatten() - b.phi.flatten()).norm(); }

double rk4_error(const ComplexState& s0, const SpectralDecomposition& sd, double dt, double t_end) {
    KleinGordonStepper<Complex> st(sd.domain(), s0.m);
    ComplexState s = s0;
    const int n = static_cast<int>(std::lround(t_end / dt));
    for (int k = 0; k < n; ++k) s = st.rk4(s, dt);
    return oracle_distance(s, spectral_solve(s0, t_end, sd));
}

}  // namespace

int main() {
    std::vector<std::pair<std::string, std::function<Line()>>> criteria;

    criteria.push_back({"identity suite, 100 trials per rule, axes up to 16 points", [] {
        RunConfig c = config(Command::Identities);
        c.trials = 100;
        c.max_axis = 16;
        const auto t = timed_run(c);
        Line l;
        double worst = 0.0;
        for (const auto& k : t.report.checks) worst = std::max(worst, k.value);
        l.require(t.report.passed() && t.report.checks.size() == 13, "13 rules");
        char buf[64];
        std::snprintf(buf, sizeof buf, "worst relative %.2e <= 1e-12", worst);
        l.require(worst <= 1e-12, buf);
        l.runtime(t.seconds, 10.0);
        return l;
    }});

    criteria.push_back({"discrete Gauss theorem, 100 random currents, dims 2-4", [] {
        RunConfig c = config(Command::Gauss);
        c.trials = 100;
        const auto t = timed_run(c);
        Line l;
        l.require(check(t.report, "gauss-theorem"));
        l.require(check(t.report, "gauss-brute-force"));
        l.runtime(t.seconds, 5.0);
        return l;
    }});

    criteria.push_back({"conserved slice sums of divergence-free currents", [] {
        Line l;
        l.require(check(run_suite(config(Command::Gauss)), "conserved-slice-sums"));
        return l;
    }});

    const Report spectrum = run_suite(config(Command::Spectrum));
    criteria.push_back({"P = -i D# hermitian, real spectrum, unitary eigenvectors at size 64", [&] {
        Line l;
        l.require(check(spectrum, "p-hermitian"));
        l.require(check(spectrum, "p-real-spectrum"));
        l.require(check(spectrum, "p-unitary-eigenvectors"));
        return l;
    }});

    criteria.push_back({"P^2 + Q^2 spectrum 2n + 1 at size 60 and [Q, P] = i", [&] {
        Line l;
        l.require(check(spectrum, "number-spectrum"));
        l.require(check(spectrum, "canonical-commutator"));
        return l;
    }});

    criteria.push_back({"KG residual O(eps^2) under translations and rotations; Schroedinger boost O(eps)", [] {
        Line l;
        int runs = 0, ok = 0;
        for (const char* eq : {"kg-diffdiff", "kg-difference"})
            for (const char* tr : {"translate1", "translate2", "translate3", "rot12", "rot13", "rot23"}) {
                RunConfig c = config(Command::Invariance);
                c.equation = eq;
                c.transform = tr;
                const bool pass = run_suite(c).passed();
                ++runs;
                ok += pass;
                if (!pass) l.require(false, std::string(eq) + " " + tr);
            }
        l.require(ok == runs, std::to_string(ok) + "/" + std::to_string(runs) + " KG ladders in [3.5, 4.5] or at floor");
        for (const char* tr : {"boost14", "boost24"}) {
            RunConfig c = config(Command::Invariance);
            c.equation = "schroedinger";
            c.transform = tr;
            const auto& k = check(run_suite(c), "first-order-residual");
            char buf[96];
            std::snprintf(buf, sizeof buf, "schroedinger %s ratio %.3f in [1.8, 2.2]", tr, k.value);
            l.require(k.pass, buf);
        }
        return l;
    }});

    const Report variational = run_suite(config(Command::Variational));
    criteria.push_back({"EL residual vs action gradient (30 random Lagrangians); boundary ledger on a 5x5 hull", [&] {
        Line l;
        l.require(check(variational, "el-vs-action-gradient"));
        l.require(check(variational, "boundary-ledger"));
        return l;
    }});

    criteria.push_back({"KG Lagrangian EL residual equals the lattice KG operator", [&] {
        Line l;
        l.require(check(variational, "kg-el-operator"));
        return l;
    }});

    criteria.push_back({"conservation over 1000 leapfrog steps, dt 1e-3, grid 8^3, m = 1", [] {
        RunConfig c = config(Command::Conserve);
        c.grid = {8, 8, 8};
        c.steps = 1000;
        c.dt = 1e-3;
        c.mass = 1.0;
        const auto t = timed_run(c);
        Line l;
        l.require(check(t.report, "energy-drift"));
        l.require(check(t.report, "charge-drift"));
        l.require(check(t.report, "energy-balance"));
        l.runtime(t.seconds, 60.0);
        return l;
    }});

    criteria.push_back({"leapfrog vs spectral oracle at t = 1; rk4 order under dt halving", [] {
        RunConfig c = config(Command::Evolve);
        c.every = 1000;
        Line l;
        l.require(check(run_suite(c), "oracle-error"));
        const auto d = make_grid({6, 6, 6});
        SpectralDecomposition sd(d, 1.0);
        const ComplexState s0{band_limited_complex(sd, 5), band_limited_complex(sd, 6), 0.0, 1.0};
        const double e1 = rk4_error(s0, sd, 0.04, 1.0), e2 = rk4_error(s0, sd, 0.02, 1.0);
        char buf[96];
        std::snprintf(buf, sizeof buf, "rk4 ratio %.2f in [15, 17] (errors %.1e, %.1e)", e1 / e2, e1, e2);
        l.require(e1 / e2 >= 15.0 && e1 / e2 <= 17.0, buf);
        return l;
    }});

    criteria.push_back({"identical configuration and seed give byte-identical reports", [] {
        Line l;
        int same = 0, total = 0;
        RunConfig ev = config(Command::Evolve);
        ev.steps = 200;
        RunConfig inv = config(Command::Invariance);
        inv.transform = "rot12";
        for (const auto& c : {config(Command::Identities), config(Command::Gauss), ev, inv, config(Command::Variational)}) {
            const Report a = run_suite(c), b = run_suite(c);
            ++total;
            same += a.csv() == b.csv() && a.json() == b.json();
        }
        l.require(same == total, std::to_string(same) + "/" + std::to_string(total) + " suites identical in csv and json");
        return l;
    }});

    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Line l;
        try {
            l = criteria[k].second();
        } catch (const std::exception& e) {
            l.require(false, e.what());
        }
        failed += !l.pass;
        std::printf("%s %2zu %s: %s\n", l.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), l.detail.c_str());
    }
    return failed == 0 ? 0 : 1;
}
