#include "dps/noether.hpp"

#include <algorithm>

namespace dps {

namespace {

template <class Scalar>
Complex cplx(Scalar v) {
    return Complex(v);
}

/// Values of dL/dz and L on the hull of `d`, zero elsewhere, plus the field
/// ingredients that multiply them (stored values, zero beyond storage).
template <class Scalar>
struct Ingredients {
    const QuadraticLagrangian& L;
    const LatticeDomain& d;
    const LatticeField<Scalar>& f;
    const LatticeField<Scalar>* dt_f;
    Eigen::MatrixXcd G;
    Eigen::VectorXcd Lv;

    Ingredients(const QuadraticLagrangian& lag, const LatticeDomain& dom, const LatticeField<Scalar>& field,
                const LatticeField<Scalar>* dt)
        : L(lag), d(dom), f(field), dt_f(dt) {
        const Eigen::MatrixXcd Z = dt ? jet_matrix(L.layout(), f, *dt) : jet_matrix(L.layout(), f, d);
        G = (L.hessian() * Z).colwise() + L.linear();
        Lv.resize(Z.cols());
        for (Eigen::Index k = 0; k < Z.cols(); ++k) Lv(k) = L.value(Z.col(k));
    }

    int lattice_axes() const { return d.dim(); }
    int time_slot() const { return dt_f ? d.dim() : -1; }

    Complex grad(int slot, const Point& p) const {
        return d.in_hull(p) ? G(slot, static_cast<Eigen::Index>(d.linear_index(p))) : Complex{};
    }
    Complex lagrangian(const Point& p) const {
        return d.in_hull(p) ? Lv(static_cast<Eigen::Index>(d.linear_index(p))) : Complex{};
    }
    /// D#_mu A or d/dt A of component c (conjugated for the conjugate slots).
    Complex factor(int c, int mu, bool conj, const Point& p) const {
        Complex v = mu == time_slot() ? cplx(dt_f->at(c, p)) : cplx(diff_at(f, c, mu, DiffKind::WeightedMean, p));
        return conj ? std::conj(v) : v;
    }
    /// sum over components (and conjugate slots) of dL/dy_nu at q times factor_mu at r.
    Complex pair(int nu, int mu, const Point& q, const Point& r) const {
        const auto& l = L.layout();
        Complex s{};
        for (int c = 0; c < l.components; ++c)
            for (bool conj : {false, true}) {
                if (conj && !l.complex) continue;
                s += grad(l.deriv(c, nu, conj), q) * factor(c, mu, conj, r);
            }
        return s;
    }
};

double half_sqrt(int n) { return std::sqrt(0.5 * static_cast<double>(n)); }

/// Hull points plus the upper halo layer along `axis` (axis < 0: hull only).
template <class Fn>
void for_hull_and_upper(const LatticeDomain& d, int axis, Fn&& fn) {
    d.for_each_point([&](const Point& p) {
        fn(p);
        if (axis >= 0 && p[static_cast<std::size_t>(axis)] == d.upper(axis)) fn(shifted(p, axis, 1));
    });
}

template <class Scalar>
StressTensor assemble(const Ingredients<Scalar>& in, NoetherRep rep) {
    const auto& d = in.d;
    const int la = in.lattice_axes();
    const int axes = rep == NoetherRep::A ? la : la + 1;
    StressTensor T;
    T.rep = rep;
    T.domain = d;
    T.axes = axes;
    T.t.assign(static_cast<std::size_t>(axes * axes), ComplexField(d, 1));
    T.complete.assign(static_cast<std::size_t>(axes), false);
    if (rep == NoetherRep::B) T.complete[static_cast<std::size_t>(la)] = true;
    for (int nu = 0; nu < axes; ++nu) {
        for (int mu = 0; mu < axes; ++mu) {
            auto& out = T.at(nu, mu);
            const double delta = nu == mu ? 1.0 : 0.0;
            if (nu == la) {
                // time row of rep B: no weights, no shifts
                d.for_each_point([&](const Point& p) { out.ref(p) = in.pair(nu, mu, p, p) - delta * in.lagrangian(p); });
                continue;
            }
            for_hull_and_upper(d, nu, [&](const Point& p) {
                const int n = p[static_cast<std::size_t>(nu)];
                if (n == 0) return;  // the sqrt(n/2) weight vanishes
                const Point q = shifted(p, nu, -1);
                out.ref(p) = half_sqrt(n) * (in.pair(nu, mu, q, p) + in.pair(nu, mu, p, q) - delta * in.lagrangian(p));
            });
        }
    }
    return T;
}

void require_storage(const LatticeDomain& fd, const LatticeDomain& d) {
    if (d.dim() != fd.dim()) throw DimensionError("domain and field differ in dimension");
    for (int a = 0; a < d.dim(); ++a)
        if (d.lower(a) < fd.lower(a) || d.upper(a) > fd.upper(a))
            throw HaloMissing("axis " + std::to_string(a + 1) + " needs one stored layer beyond the domain");
}

template <class Scalar>
void require_layout(const QuadraticLagrangian& L, const LatticeField<Scalar>& f, int axes) {
    if (L.layout().components != f.components()) throw ComponentError("Lagrangian and field differ in components");
    if (L.layout().axes != axes)
        throw DimensionError("Lagrangian has " + std::to_string(L.layout().axes) + " derivative slots, expected " +
                             std::to_string(axes));
}

}  // namespace

template <class Scalar>
StressTensor stress_tensor(const QuadraticLagrangian& L, const LatticeField<Scalar>& f, const LatticeDomain& d) {
    require_layout(L, f, d.dim());
    require_storage(f.domain(), d);
    return assemble(Ingredients<Scalar>(L, d, f, nullptr), NoetherRep::A);
}

template <class Scalar>
StressTensor stress_tensor(const QuadraticLagrangian& L, const LatticeField<Scalar>& f) {
    return stress_tensor(L, f, f.domain());
}

template <class Scalar>
StressTensor stress_tensor(const QuadraticLagrangian& L, const LatticeField<Scalar>& f, const LatticeField<Scalar>& dt_f) {
    require_layout(L, f, f.domain().dim() + 1);
    if (!dt_f.same_shape(f)) throw DomainMismatch("time derivative must match the field");
    return assemble(Ingredients<Scalar>(L, f.domain(), f, &dt_f), NoetherRep::B);
}

template <class Scalar>
StressTensor stress_tensor_rate(const QuadraticLagrangian& L, const LatticeField<Scalar>& f,
                                const LatticeField<Scalar>& dt_f, const LatticeField<Scalar>& dt2_f) {
    if (!dt2_f.same_shape(f)) throw DomainMismatch("second time derivative must match the field");
    StressTensor plus = stress_tensor(L, f + dt_f, dt_f + dt2_f);
    const StressTensor minus = stress_tensor(L, f - dt_f, dt_f - dt2_f);
    for (std::size_t k = 0; k < plus.t.size(); ++k) plus.t[k] = (plus.t[k] - minus.t[k]) * Complex(0.5);
    return plus;
}

namespace {

ConservationReport divergence(const StressTensor& T, const std::vector<ComplexField>* time_rate) {
    const auto& d = T.domain;
    const int la = d.dim();
    ConservationReport r;
    r.complete = T.complete;
    for (int mu = 0; mu < T.axes; ++mu) {
        ComplexField acc(d, 1);
        for (int nu = 0; nu < la; ++nu) acc += diff(T.at(nu, mu), nu, DiffKind::Right);
        if (time_rate) acc += (*time_rate)[static_cast<std::size_t>(mu)];
        acc.clear_halo();
        r.max_abs.push_back(acc.hull_values().cwiseAbs().maxCoeff());
        r.residual.push_back(std::move(acc));
    }
    return r;
}

}  // namespace

ConservationReport conservation_residual(const StressTensor& T) {
    if (T.rep != NoetherRep::A) throw DomainMismatch("rep B conservation needs the time derivative");
    return divergence(T, nullptr);
}

ConservationReport conservation_residual(const StressTensor& T, const StressTensor& rate) {
    if (T.rep != NoetherRep::B || rate.rep != NoetherRep::B || !(T.domain == rate.domain))
        throw DomainMismatch("stress tensor and rate must be rep B on one domain");
    const int tt = T.domain.dim();
    std::vector<ComplexField> dt;
    for (int mu = 0; mu < T.axes; ++mu) dt.push_back(rate.at(tt, mu));
    return divergence(T, &dt);
}

std::vector<ConservationReport> conservation_residual(const std::vector<StressTensor>& series,
                                                      const std::vector<double>& t) {
    if (series.size() < 3) throw SnapshotCountError("central differences need at least three snapshots");
    if (t.size() != series.size()) throw SnapshotCountError("snapshot and time counts differ");
    const double h = t[1] - t[0];
    for (std::size_t k = 1; k < t.size(); ++k)
        if (std::abs((t[k] - t[k - 1]) - h) > 1e-9 * std::abs(h)) throw SnapshotCountError("time grid is not uniform");
    std::vector<ConservationReport> out;
    for (std::size_t k = 1; k + 1 < series.size(); ++k) {
        const auto& T = series[k];
        if (T.rep != NoetherRep::B) throw DomainMismatch("snapshot series must be rep B");
        const int tt = T.domain.dim();
        std::vector<ComplexField> dt;
        for (int mu = 0; mu < T.axes; ++mu)
            dt.push_back((series[k + 1].at(tt, mu) - series[k - 1].at(tt, mu)) * Complex(0.5 / h));
        auto r = divergence(T, &dt);
        r.t = t[k];
        out.push_back(std::move(r));
    }
    return out;
}

void require_gauge_invariant(const QuadraticLagrangian& L, double tol) {
    const auto& l = L.layout();
    if (!l.complex) throw NotGaugeInvariant("phase rotations need a complex Lagrangian");
    if (!L.is_real_valued()) throw NotGaugeInvariant("Lagrangian is not real-valued");
    if (L.linear().cwiseAbs().maxCoeff() > tol) throw NotGaugeInvariant("linear terms change under a phase rotation");
    const auto n = l.block();
    const double same = std::max(L.hessian().topLeftCorner(n, n).cwiseAbs().maxCoeff(),
                                 L.hessian().bottomRightCorner(n, n).cwiseAbs().maxCoeff());
    if (same > tol) throw NotGaugeInvariant("rho rho or rho-bar rho-bar terms change under a phase rotation");
}

namespace {

ChargeCurrent assemble_current(const Ingredients<Complex>& in, NoetherRep rep, double e) {
    const auto& d = in.d;
    const auto& l = in.L.layout();
    const int la = d.dim();
    const Complex ie(0.0, e);
    ChargeCurrent j;
    j.rep = rep;
    j.domain = d;
    j.e = e;
    const int axes = rep == NoetherRep::A ? la : la + 1;
    j.j.assign(static_cast<std::size_t>(axes), ComplexField(d, 1));
    for (int mu = 0; mu < la; ++mu) {
        auto& out = j.j[static_cast<std::size_t>(mu)];
        for_hull_and_upper(d, mu, [&](const Point& p) {
            const int n = p[static_cast<std::size_t>(mu)];
            if (n == 0) return;
            const Point q = shifted(p, mu, -1);
            Complex x{};
            for (int c = 0; c < l.components; ++c)
                x += in.grad(l.deriv(c, mu), q) * in.f.at(c, p) + in.grad(l.deriv(c, mu), p) * in.f.at(c, q);
            const Complex term = ie * half_sqrt(n) * x;
            out.ref(p) = term + std::conj(term);
        });
    }
    if (rep == NoetherRep::B) {
        auto& out = j.j[static_cast<std::size_t>(la)];
        d.for_each_point([&](const Point& p) {
            Complex x{};
            for (int c = 0; c < l.components; ++c)
                x += in.grad(l.deriv(c, la), p) * in.f.at(c, p) -
                     in.grad(l.deriv(c, la, true), p) * std::conj(in.f.at(c, p));
            out.ref(p) = ie * x;
        });
    }
    return j;
}

}  // namespace

ChargeCurrent charge_current(const QuadraticLagrangian& L, const ComplexField& phi, double e) {
    require_layout(L, phi, phi.domain().dim());
    require_gauge_invariant(L);
    return assemble_current(Ingredients<Complex>(L, phi.domain(), phi, nullptr), NoetherRep::A, e);
}

ChargeCurrent charge_current(const QuadraticLagrangian& L, const ComplexField& phi, const ComplexField& dt_phi, double e) {
    require_layout(L, phi, phi.domain().dim() + 1);
    if (!dt_phi.same_shape(phi)) throw DomainMismatch("time derivative must match the field");
    require_gauge_invariant(L);
    return assemble_current(Ingredients<Complex>(L, phi.domain(), phi, &dt_phi), NoetherRep::B, e);
}

ChargeCurrent charge_current_rate(const QuadraticLagrangian& L, const ComplexField& phi, const ComplexField& dt_phi,
                                  const ComplexField& dt2_phi, double e) {
    if (!dt2_phi.same_shape(phi)) throw DomainMismatch("second time derivative must match the field");
    ChargeCurrent plus = charge_current(L, phi + dt_phi, dt_phi + dt2_phi, e);
    const ChargeCurrent minus = charge_current(L, phi - dt_phi, dt_phi - dt2_phi, e);
    for (std::size_t k = 0; k < plus.j.size(); ++k) plus.j[k] = (plus.j[k] - minus.j[k]) * Complex(0.5);
    return plus;
}

ComplexField current_divergence(const ChargeCurrent& j) {
    if (j.rep != NoetherRep::A) throw DomainMismatch("rep B divergence needs the rate of j^4");
    ComplexField acc(j.domain, 1);
    for (int mu = 0; mu < j.domain.dim(); ++mu) acc += diff(j.j[static_cast<std::size_t>(mu)], mu, DiffKind::Right);
    acc.clear_halo();
    return acc;
}

ComplexField current_divergence(const ChargeCurrent& j, const ChargeCurrent& rate) {
    if (j.rep != NoetherRep::B || rate.rep != NoetherRep::B || !(j.domain == rate.domain))
        throw DomainMismatch("current and rate must be rep B on one domain");
    const int la = j.domain.dim();
    ComplexField acc = rate.j[static_cast<std::size_t>(la)];
    for (int b = 0; b < la; ++b) acc += diff(j.j[static_cast<std::size_t>(b)], b, DiffKind::Right);
    acc.clear_halo();
    return acc;
}

ComplexField gauge_bracket(const QuadraticLagrangian& L, const ComplexField& phi) {
    const auto& d = phi.domain();
    require_layout(L, phi, d.dim());
    if (!L.layout().complex) throw NotGaugeInvariant("phase rotations need a complex Lagrangian");
    const auto& l = L.layout();
    const Eigen::MatrixXcd Z = jet_matrix(l, phi, d);
    const Eigen::MatrixXcd G = (L.hessian() * Z).colwise() + L.linear();
    Eigen::VectorXcd s = Eigen::VectorXcd::Ones(l.slots());
    s.tail(l.block()).setConstant(-1.0);
    ComplexField out(d, 1);
    out.set_hull_values((G.cwiseProduct(Z).transpose() * s).eval());
    return out;
}

ComplexField gauge_divergence_form(const QuadraticLagrangian& L, const ComplexField& phi) {
    const auto& d = phi.domain();
    require_layout(L, phi, d.dim());
    const auto& l = L.layout();
    const Ingredients<Complex> in(L, d, phi, nullptr);
    ComplexField out(d, 1);
    for (int c = 0; c < l.components; ++c)
        for (int mu = 0; mu < d.dim(); ++mu) {
            ComplexField a(d, 1);
            a.set_hull_values(in.G.row(l.deriv(c, mu)).transpose());
            const ComplexField da = diff(a, mu, DiffKind::WeightedMean);
            d.for_each_point([&](const Point& p) {
                const Complex term =
                    Complex(0.0, 1.0) * (da.at(p) * phi.at(c, p) + a.at(p) * diff_at(phi, c, mu, DiffKind::WeightedMean, p));
                out.ref(p) += term + std::conj(term);
            });
        }
    return out;
}

Complex total_charge(const QuadraticLagrangian& L, const ComplexField& phi, const ComplexField& dt_phi, double e) {
    require_layout(L, phi, phi.domain().dim() + 1);
    if (!dt_phi.same_shape(phi)) throw DomainMismatch("time derivative must match the field");
    require_gauge_invariant(L);
    const auto& l = L.layout();
    const int la = phi.domain().dim();
    const Ingredients<Complex> in(L, phi.domain(), phi, &dt_phi);
    Complex x{};
    phi.domain().for_each_point([&](const Point& p) {
        for (int c = 0; c < l.components; ++c) x += in.grad(l.deriv(c, la), p) * phi.at(c, p);
    });
    const Complex term = Complex(0.0, -e) * x;
    return term + std::conj(term);
}

Complex total_charge_slices(const QuadraticLagrangian& L, const ComplexField& phi, double e, int s1, int s2) {
    const auto& d = phi.domain();
    require_layout(L, phi, d.dim());
    require_gauge_invariant(L);
    const int last = d.dim() - 1;
    for (int s : {s1, s2})
        if (s < d.lower(last) || s > d.upper(last))
            throw RangeError("slice " + std::to_string(s) + " outside the last axis of the hull");
    const auto& l = L.layout();
    const Ingredients<Complex> in(L, d, phi, nullptr);
    Complex x{};
    d.for_each_point([&](const Point& p) {
        if (p[static_cast<std::size_t>(last)] != s1) return;
        Point p2 = p;
        p2[static_cast<std::size_t>(last)] = s2;
        for (int c = 0; c < l.components; ++c)
            x += in.grad(l.deriv(c, last), p) * phi.at(c, p2) + in.grad(l.deriv(c, last), p2) * phi.at(c, p);
    });
    const Complex term = Complex(0.0, -e / std::sqrt(2.0)) * x;
    return term + std::conj(term);
}

Totals totals(const StressTensor& T, const ChargeCurrent* j, Complex q, int slice, double tail_tol) {
    const auto& d = T.domain;
    const int last = T.axes - 1;           // index of the time component
    const int sliced = T.rep == NoetherRep::A ? d.dim() - 1 : -1;
    if (sliced >= 0 && (slice < d.lower(sliced) || slice > d.upper(sliced)))
        throw RangeError("slice " + std::to_string(slice) + " outside the last axis of the hull");
    if (j && (j->rep != T.rep || !(j->domain == d))) throw DomainMismatch("current and stress tensor do not match");
    Totals out;
    out.P.assign(static_cast<std::size_t>(T.axes), Complex{});
    out.Q = q;
    d.for_each_point([&](const Point& p) {
        if (sliced >= 0 && p[static_cast<std::size_t>(sliced)] != slice) return;
        bool shell = false;
        for (int a = 0; a < d.dim(); ++a)
            if (a != sliced && p[static_cast<std::size_t>(a)] == d.upper(a)) shell = true;
        for (int mu = 0; mu < T.axes; ++mu) out.P[static_cast<std::size_t>(mu)] -= T.at(last, mu).at(p);
        double edge = std::abs(T.at(last, last).at(p));
        if (j) {
            const Complex j4 = j->j[static_cast<std::size_t>(last)].at(p);
            out.Q_current += j4;
            edge = std::max(edge, std::abs(j4));
        }
        if (shell) out.shell_max = std::max(out.shell_max, edge);
    });
    out.H = -out.P[static_cast<std::size_t>(last)];
    if (tail_tol >= 0.0 && out.shell_max > tail_tol)
        throw TailTooLarge("densities on the truncation shell reach " + std::to_string(out.shell_max));
    return out;
}

template StressTensor stress_tensor(const QuadraticLagrangian&, const LatticeField<double>&);
template StressTensor stress_tensor(const QuadraticLagrangian&, const LatticeField<Complex>&);
template StressTensor stress_tensor(const QuadraticLagrangian&, const LatticeField<double>&, const LatticeDomain&);
template StressTensor stress_tensor(const QuadraticLagrangian&, const LatticeField<Complex>&, const LatticeDomain&);
template StressTensor stress_tensor(const QuadraticLagrangian&, const LatticeField<double>&, const LatticeField<double>&);
template StressTensor stress_tensor(const QuadraticLagrangian&, const LatticeField<Complex>&, const LatticeField<Complex>&);
template StressTensor stress_tensor_rate(const QuadraticLagrangian&, const LatticeField<double>&,
                                         const LatticeField<double>&, const LatticeField<double>&);
template StressTensor stress_tensor_rate(const QuadraticLagrangian&, const LatticeField<Complex>&,
                                         const LatticeField<Complex>&, const LatticeField<Complex>&);

}  // namespace dps
