#include "dps/covariance.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <map>

#include <unsupported/Eigen/MatrixFunctions>

namespace dps {

std::string to_string(Equation e) {
    switch (e) {
        case Equation::KG_Difference: return "kg-difference";
        case Equation::KG_DiffDiff: return "kg-diffdiff";
        case Equation::Schroedinger: return "schroedinger";
    }
    return "?";
}

namespace {

using Vec = Eigen::VectorXcd;

Vec times(const Eigen::MatrixXcd& m, const ComplexField& f) { return m * f.flatten(); }

ComplexField as_field(const ComplexField& like, const Vec& v) {
    return ComplexField::unflatten(like.domain(), like.components(), v);
}

void require_components(const ComplexField& phi, const SpinBlock& spin) {
    if (phi.components() != spin.components)
        throw SpinShapeError("field has " + std::to_string(phi.components()) + " components, spin block " +
                             std::to_string(spin.components));
}

/// Sum over the axes of eta_mu D#_mu^2 applied to a one-component hull vector.
Vec sharp_laplacian(const LatticeDomain& d, const Vec& v, bool lorentzian) {
    Vec out = Vec::Zero(v.size());
    for (int a = 0; a < d.dim(); ++a) {
        const Eigen::MatrixXd D = real_op(OpKind::DeltaSharp, d.extent(a), d.lower(a));
        const double s = lorentzian ? MetricSignature::eta(a, a) : 1.0;
        out += s * apply_axis(d, a, Eigen::MatrixXd(D * D), v);
    }
    return out;
}

Vec laplacian_all(const ComplexField& f, bool lorentzian) {
    const auto& d = f.domain();
    const auto m = static_cast<Eigen::Index>(d.hull_size());
    Vec out(m * f.components());
    for (int c = 0; c < f.components(); ++c) out.segment(c * m, m) = sharp_laplacian(d, f.hull_values(c), lorentzian);
    return out;
}

double masked_norm(const ComplexField& f, int inset) {
    const auto& d = f.domain();
    double s = 0.0;
    for (int c = 0; c < f.components(); ++c)
        d.for_each_point([&](const Point& p) {
            if (!near_truncation_edge(d, p, inset)) s += std::norm(f.at(c, p));
        });
    return std::sqrt(s);
}

/// The operator axes a parameter set acts on, or empty when it needs the
/// continuous time axis.
std::vector<int> active_axes(const PoincareParams& p, Rep rep, int dim) {
    const int lattice_axes = rep == Rep::DifferenceRep ? 4 : 3;
    std::vector<bool> on(4, false);
    for (int mu = 0; mu < 4; ++mu)
        if (p.eps[static_cast<std::size_t>(mu)] != 0.0) {
            if (mu >= lattice_axes) throw UnsupportedTransform("time translation has no lattice exponential");
            on[static_cast<std::size_t>(mu)] = true;
        }
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu)
            if (mu != nu && p.eps2(mu, nu) != 0.0) {
                if (mu >= lattice_axes || nu >= lattice_axes)
                    throw UnsupportedTransform("boosts of the difference-differential representation have no exponential");
                on[static_cast<std::size_t>(mu)] = on[static_cast<std::size_t>(nu)] = true;
            }
    std::vector<int> axes;
    for (int a = 0; a < 4; ++a)
        if (on[static_cast<std::size_t>(a)]) {
            if (a >= dim) throw AxisError("parameter acts on axis " + std::to_string(a + 1) + " of a " + std::to_string(dim) + "D domain");
            axes.push_back(a);
        }
    return axes;
}

Eigen::MatrixXcd spin_exponential(const PoincareParams& p, const SpinBlock& spin) {
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(spin.components, spin.components);
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu)
            if (p.eps2(mu, nu) != 0.0)
                s += Complex(0.0, 0.5 * p.eps2(mu, nu)) * spin.S[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)];
    return s.exp();
}

/// exp(G) applied with the orbital exponential built on the active axes only
/// and the spin exponential on the components.
ComplexField exponentiate(const ComplexField& phi, const PoincareParams& p, Rep rep, const SpinBlock& spin,
                          BoostForm boost) {
    require_components(phi, spin);
    const auto& d = phi.domain();
    const std::vector<int> axes = active_axes(p, rep, d.dim());
    ComplexField out = phi;
    out.clear_halo();
    if (!axes.empty()) {
        std::vector<int> lo, hi;
        for (int a : axes) {
            lo.push_back(d.lower(a));
            hi.push_back(d.upper(a));
        }
        const LatticeDomain sub = make_domain(lo, hi);
        PoincareParams sp;
        int time_axis = -1;
        for (std::size_t i = 0; i < axes.size(); ++i) {
            if (rep == Rep::DifferenceRep && axes[i] == 3) time_axis = static_cast<int>(i);
            sp.eps[i] = p.eps[static_cast<std::size_t>(axes[i])];
            for (std::size_t j = 0; j < axes.size(); ++j) sp.eps2(static_cast<int>(i), static_cast<int>(j)) = p.eps2(axes[i], axes[j]);
        }
        // the orbital part is the same in both representations once time is excluded
        const Eigen::MatrixXcd U = generator_matrix(sp, Rep::DifferenceRep, SpinBlock::scalar(), sub, boost, time_axis).constant.exp();
        const auto nsub = static_cast<Eigen::Index>(sub.hull_size());
        // gather: column per assignment of the inactive coordinates
        std::vector<Eigen::Index> column_of(d.hull_size());
        std::vector<Eigen::Index> row_of(d.hull_size());
        std::map<std::vector<int>, Eigen::Index> key_index;
        {
            Eigen::Index k = 0;
            d.for_each_point([&](const Point& q) {
                std::vector<int> key;
                for (int a = 0; a < d.dim(); ++a)
                    if (std::find(axes.begin(), axes.end(), a) == axes.end()) key.push_back(q[static_cast<std::size_t>(a)]);
                auto it = key_index.find(key);
                if (it == key_index.end()) it = key_index.emplace(key, static_cast<Eigen::Index>(key_index.size())).first;
                Point sq{};
                for (std::size_t i = 0; i < axes.size(); ++i) sq[i] = q[static_cast<std::size_t>(axes[i])];
                column_of[static_cast<std::size_t>(k)] = it->second;
                row_of[static_cast<std::size_t>(k)] = static_cast<Eigen::Index>(sub.linear_index(sq));
                ++k;
            });
        }
        const auto ncols = static_cast<Eigen::Index>(key_index.size());
        for (int c = 0; c < phi.components(); ++c) {
            const Vec v = phi.hull_values(c);
            Eigen::MatrixXcd V(nsub, ncols);
            for (std::size_t k = 0; k < column_of.size(); ++k) V(row_of[k], column_of[k]) = v(static_cast<Eigen::Index>(k));
            const Eigen::MatrixXcd W = U * V;
            Vec w(v.size());
            for (std::size_t k = 0; k < column_of.size(); ++k) w(static_cast<Eigen::Index>(k)) = W(row_of[k], column_of[k]);
            out.set_hull_values(w, c);
        }
    }
    if (spin.components > 1) {
        const Eigen::MatrixXcd Us = spin_exponential(p, spin);
        const auto m = static_cast<Eigen::Index>(d.hull_size());
        Eigen::MatrixXcd block(m, spin.components);
        for (int c = 0; c < spin.components; ++c) block.col(c) = out.hull_values(c);
        const Eigen::MatrixXcd mixed = block * Us.transpose();
        for (int c = 0; c < spin.components; ++c) out.set_hull_values(mixed.col(c), c);
    }
    return out;
}

void check_support(const ComplexField& phi, const FiniteOptions& opt) {
    if (!opt.check_support) return;
    const auto& d = phi.domain();
    double all = 0.0, edge = 0.0;
    for (int c = 0; c < phi.components(); ++c)
        d.for_each_point([&](const Point& p) {
            const double v = std::abs(phi.at(c, p));
            all = std::max(all, v);
            if (near_truncation_edge(d, p, opt.support_inset)) edge = std::max(edge, v);
        });
    if (edge > opt.support_tol * all)
        throw SupportTooWide("field reaches " + std::to_string(edge / all) + " of its maximum within " +
                             std::to_string(opt.support_inset) + " layers of a truncation edge");
}

void check_lorentz(const FinitePoincare& f, double tol) {
    const double c = f.constraint().cwiseAbs().maxCoeff();
    if (c > tol) throw LorentzConstraintViolated("Lorentz constraint residual " + std::to_string(c));
}

Rep rep_of(Equation e) { return e == Equation::KG_Difference ? Rep::DifferenceRep : Rep::DiffDiffRep; }

}  // namespace

bool near_truncation_edge(const LatticeDomain& d, const Point& p, int inset) {
    for (int a = 0; a < d.dim(); ++a) {
        const int c = p[static_cast<std::size_t>(a)];
        if (c > d.upper(a) - inset) return true;
        if (d.lower(a) > 0 && c < d.lower(a) + inset) return true;
    }
    return false;
}

ComplexField lie_variation(const ComplexField& phi, const PoincareParams& params, Rep rep, const SpinBlock& spin) {
    require_components(phi, spin);
    const GeneratorMatrix g = generator_matrix(params, rep, spin, phi.domain());
    if (g.needs_dt) throw MissingTimeDerivative("the variation involves d/dt phi");
    return as_field(phi, times(g.constant, phi));
}

ComplexField lie_variation(const ComplexField& phi, const ComplexField& dt_phi, double t, const PoincareParams& params,
                           Rep rep, const SpinBlock& spin, BoostForm boost) {
    require_components(phi, spin);
    const GeneratorMatrix g = generator_matrix(params, rep, spin, phi.domain(), boost);
    Vec v = times(g.at(t), phi);
    if (g.needs_dt) {
        if (!dt_phi.same_shape(phi)) throw MissingTimeDerivative("d/dt phi missing or shaped unlike phi");
        v += g.dt_coeff * dt_phi.flatten();
    }
    return as_field(phi, v);
}

OracleSolution kg_diffdiff_oracle(const SpectralDecomposition& sd, const ComplexState& initial) {
    OracleSolution s;
    s.equation = Equation::KG_DiffDiff;
    s.domain = sd.domain();
    s.m = initial.m;
    if (std::abs(sd.mass() - initial.m) > 0.0) throw DomainMismatch("spectral decomposition built for another mass");
    s.jet = [sd, initial](double t) {
        const ComplexState x = spectral_solve(initial, t, sd);
        const auto& d = sd.domain();
        FieldJet j;
        j.t = t;
        j.f = x.phi;
        j.f1 = x.pi;
        j.f2 = ComplexField::unflatten(d, 1, kg_operator(d, initial.m, Vec(x.phi.hull_values())));
        j.f3 = ComplexField::unflatten(d, 1, kg_operator(d, initial.m, Vec(x.pi.hull_values())));
        return j;
    };
    return s;
}

OracleSolution schroedinger_oracle(const SpectralDecomposition& sd, const ComplexField& psi0) {
    OracleSolution s;
    s.equation = Equation::Schroedinger;
    s.domain = sd.domain();
    s.m = sd.mass();
    s.jet = [sd, psi0](double t) {
        const double m = sd.mass();
        const auto& d = sd.domain();
        const Complex k(0.0, 1.0 / (2.0 * m));  // d/dt = (i/2m) sum D#^2
        FieldJet j;
        j.t = t;
        j.f = schroedinger_evolve(psi0, m, t, sd);
        Vec v = j.f.hull_values();
        for (ComplexField* out : {&j.f1, &j.f2, &j.f3}) {
            v = k * sharp_laplacian(d, v, false);
            *out = ComplexField::unflatten(d, 1, v);
        }
        return j;
    };
    return s;
}

OracleSolution kg_difference_oracle(const LatticeDomain& d4, const std::vector<int>& mode) {
    if (d4.dim() != 4) throw DimensionError("the difference Klein-Gordon oracle needs four axes");
    if (mode.size() != 4) throw DimensionError("one mode index per axis");
    Vec v = Vec::Ones(1);
    double m2 = 0.0;
    for (int a = 0; a < 4; ++a) {
        const Spectrum s = spectrum(axis_op(d4, a, OpKind::P));
        const int k = mode[static_cast<std::size_t>(a)];
        if (k < 0 || k >= d4.extent(a)) throw RangeError("mode index out of range on axis " + std::to_string(a + 1));
        const double p = s.values(k);
        m2 -= MetricSignature::eta(a, a) * p * p;
        // first axis fastest: the new axis is the outer factor
        Vec w(v.size() * d4.extent(a));
        for (int i = 0; i < d4.extent(a); ++i) w.segment(i * v.size(), v.size()) = s.vectors(i, k) * v;
        v = w;
    }
    if (!(m2 > 0.0)) throw RangeError("mode has p_4^2 <= sum_b p_b^2, no real mass");
    OracleSolution s;
    s.equation = Equation::KG_Difference;
    s.domain = d4;
    s.m = std::sqrt(m2);
    const ComplexField f = ComplexField::unflatten(d4, 1, v);
    s.jet = [f](double t) {
        FieldJet j;
        j.t = t;
        j.f = f;
        return j;
    };
    return s;
}

ComplexField equation_operator(Equation eq, const LatticeDomain& d, double m, const FieldJet& j) {
    switch (eq) {
        case Equation::KG_Difference:
            return as_field(j.f, laplacian_all(j.f, true) - m * m * j.f.flatten());
        case Equation::KG_DiffDiff:
            if (!j.f2.same_shape(j.f)) throw MissingTimeDerivative("the Klein-Gordon operator needs d^2/dt^2 phi");
            return as_field(j.f, laplacian_all(j.f, false) - j.f2.flatten() - m * m * j.f.flatten());
        case Equation::Schroedinger:
            if (!(m > 0.0)) throw RangeError("the Schroedinger mass must be positive");
            if (!j.f1.same_shape(j.f)) throw MissingTimeDerivative("the Schroedinger operator needs d/dt psi");
            return as_field(j.f, laplacian_all(j.f, false) / (2.0 * m) + Complex(0.0, 1.0) * j.f1.flatten());
    }
    (void)d;
    return j.f;
}

namespace {

/// Norms of the separate operator terms, used for the rounding floor.
double term_scale(Equation eq, double m, const FieldJet& j) {
    double s = laplacian_all(j.f, eq == Equation::KG_Difference).norm() + m * m * j.f.flatten().norm();
    if (eq == Equation::KG_DiffDiff) s += j.f2.flatten().norm();
    if (eq == Equation::Schroedinger) s = s / (2.0 * m) + j.f1.flatten().norm();
    return s;
}

FieldJet transform_jet(const FieldJet& j, const GeneratorMatrix& g, bool first_order, const PoincareParams& p, Rep rep,
                       const SpinBlock& spin, BoostForm boost) {
    FieldJet out;
    out.t = j.t;
    auto has = [&](const ComplexField& x) { return x.same_shape(j.f); };
    if (!first_order) {
        out.f = exponentiate(j.f, p, rep, spin, boost);
        if (has(j.f1)) out.f1 = exponentiate(j.f1, p, rep, spin, boost);
        if (has(j.f2)) out.f2 = exponentiate(j.f2, p, rep, spin, boost);
        return out;
    }
    const Eigen::MatrixXcd G = g.at(j.t);
    auto delta = [&](const ComplexField& a, const ComplexField& b) {
        Vec v = G * a.flatten();
        if (g.needs_dt) {
            if (!has(b)) throw MissingTimeDerivative("first-order variation needs a higher time derivative");
            v += g.dt_coeff * b.flatten();
        }
        return v;
    };
    out.f = as_field(j.f, j.f.flatten() + delta(j.f, j.f1));
    if (has(j.f1)) {
        Vec v = j.f1.flatten() + delta(j.f1, j.f2);
        if (g.time_dependent) v += g.t_coeff * j.f.flatten();
        out.f1 = as_field(j.f, v);
    }
    if (has(j.f2) && has(j.f3)) {
        Vec v = j.f2.flatten() + delta(j.f2, j.f3);
        if (g.time_dependent) v += 2.0 * (g.t_coeff * j.f1.flatten());
        out.f2 = as_field(j.f, v);
    }
    return out;
}

}  // namespace

InvarianceResidual invariance_residual(const OracleSolution& sol, const PoincareParams& params, double t,
                                       const InvarianceOptions& opt) {
    const FieldJet j = sol.jet(t);
    const Rep rep = rep_of(sol.equation);
    InvarianceResidual r;
    r.t = t;
    const ComplexField e0 = equation_operator(sol.equation, sol.domain, sol.m, j);
    const double scale = term_scale(sol.equation, sol.m, j);
    if (e0.flatten().norm() > opt.solution_tol * std::max(scale, 1e-300))
        throw NotASolution(to_string(sol.equation) + " base residual " + std::to_string(e0.flatten().norm()) +
                           " relative " + std::to_string(e0.flatten().norm() / scale));
    r.base = masked_norm(e0, opt.inset);

    const GeneratorMatrix g = generator_matrix(params, rep, opt.spin, sol.domain, opt.boost);
    bool first = opt.variation == Variation::FirstOrder;
    if (opt.variation == Variation::Auto) first = g.needs_dt || g.time_dependent;
    if (!first && (g.needs_dt || g.time_dependent))
        throw UnsupportedTransform("the generator involves t or d/dt; use the first-order variation");
    r.first_order = first;
    const FieldJet jt = transform_jet(j, g, first, params, rep, opt.spin, opt.boost);
    const ComplexField e = equation_operator(sol.equation, sol.domain, sol.m, jt);
    r.residual = masked_norm(e, opt.inset);
    r.floor = std::max(r.base, 64.0 * DBL_EPSILON * scale);
    return r;
}

OrderReport residual_order(const OracleSolution& sol, const PoincareParams& unit, double eps, double t,
                           const InvarianceOptions& opt) {
    OrderReport o;
    o.eps = eps;
    o.at_eps = invariance_residual(sol, unit.scaled(eps), t, opt);
    o.at_half = invariance_residual(sol, unit.scaled(eps / 2.0), t, opt);
    o.ratio = o.at_half.residual > 0.0 ? o.at_eps.residual / o.at_half.residual : 0.0;
    return o;
}

ComplexField finite_transform(const ComplexField& phi, const FinitePoincare& f, const FiniteOptions& opt) {
    check_lorentz(f, opt.constraint_tol);
    const PoincareParams p = f.generator_params();
    active_axes(p, opt.rep, phi.domain().dim());
    check_support(phi, opt);
    return exponentiate(phi, p, opt.rep, opt.spin, opt.boost);
}

ComplexField finite_transform(const std::function<ComplexField(double)>& history, double t, const FinitePoincare& f,
                              const FiniteOptions& opt) {
    check_lorentz(f, opt.constraint_tol);
    PoincareParams p = f.generator_params();
    double shift = 0.0;
    if (opt.rep == Rep::DiffDiffRep) {
        shift = p.eps[3];
        p.eps[3] = 0.0;
    }
    active_axes(p, opt.rep, 4);
    const ComplexField phi = history(t - shift);
    check_support(phi, opt);
    return exponentiate(phi, p, opt.rep, opt.spin, opt.boost);
}

Eigen::MatrixXcd transform_matrix(const PoincareParams& params, Rep rep, const SpinBlock& spin, const LatticeDomain& d) {
    const GeneratorMatrix g = generator_matrix(params, rep, spin, d);
    if (g.needs_dt || g.time_dependent) throw UnsupportedTransform("the generator involves t or d/dt");
    return g.constant.exp();
}

NormReport norm_invariance_check(const ComplexField& phi, const PoincareParams& params, const SpinBlock& spin) {
    const ComplexField dl = lie_variation(phi, params, Rep::DifferenceRep, spin);
    const Vec v = phi.flatten(), w = dl.flatten();
    NormReport r;
    r.norm2 = v.squaredNorm();
    r.norm2_varied = (v + w).squaredNorm();
    r.first_order = 2.0 * v.dot(w).real();
    return r;
}

NormReport norm_invariance_check(const std::vector<Snapshot>& snaps, const PoincareParams& params,
                                 const SpinBlock& spin, BoostForm boost, double window_tol) {
    if (snaps.size() < 2) throw WindowTooNarrow("need at least two snapshots for the time quadrature");
    NormReport r;
    double edge_max = 0.0;
    for (const auto& s : snaps) edge_max = std::max(edge_max, s.phi.flatten().squaredNorm());
    const double n_first = snaps.front().phi.flatten().squaredNorm();
    const double n_last = snaps.back().phi.flatten().squaredNorm();
    if (std::abs(n_last - n_first) > window_tol * edge_max)
        throw WindowTooNarrow("spatial norm differs by " + std::to_string(std::abs(n_last - n_first)) +
                              " between the window edges");
    for (std::size_t k = 0; k < snaps.size(); ++k) {
        double w = 0.0;
        if (k > 0) w += 0.5 * (snaps[k].t - snaps[k - 1].t);
        if (k + 1 < snaps.size()) w += 0.5 * (snaps[k + 1].t - snaps[k].t);
        const auto& s = snaps[k];
        const ComplexField dl = lie_variation(s.phi, s.dt_phi, s.t, params, Rep::DiffDiffRep, spin, boost);
        const Vec v = s.phi.flatten(), d = dl.flatten();
        r.norm2 += w * v.squaredNorm();
        r.norm2_varied += w * (v + d).squaredNorm();
        r.first_order += w * 2.0 * v.dot(d).real();
    }
    return r;
}

}  // namespace dps
