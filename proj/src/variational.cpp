#include "dps/variational.hpp"

#include <cmath>
#include <random>

#include "json.hpp"

namespace dps {

QuadraticLagrangian::QuadraticLagrangian(const JetLayout& layout) : layout_(layout) {
    if (layout.components < 1 || layout.axes < 1 || layout.axes > 4)
        throw DimensionError("jet layout needs at least one component and 1 to 4 derivative axes");
    b_ = Eigen::VectorXcd::Zero(layout.slots());
    h_ = Eigen::MatrixXcd::Zero(layout.slots(), layout.slots());
}

void QuadraticLagrangian::set_linear(int slot, Complex v) {
    if (slot < 0 || slot >= layout_.slots()) throw RangeError("slot " + std::to_string(slot) + " out of range");
    b_(slot) = v;
}

void QuadraticLagrangian::set_hessian(int i, int j, Complex v) {
    if (i < 0 || j < 0 || i >= layout_.slots() || j >= layout_.slots()) throw RangeError("hessian slot out of range");
    h_(i, j) = v;
    h_(j, i) = v;
}

Complex QuadraticLagrangian::value(const Eigen::VectorXcd& z) const {
    return c_ + (b_.transpose() * z).value() + 0.5 * (z.transpose() * h_ * z).value();
}

Eigen::VectorXcd QuadraticLagrangian::gradient(const Eigen::VectorXcd& z) const { return b_ + h_ * z; }

namespace {

/// Permutation exchanging the plain and conjugate blocks.
Eigen::PermutationMatrix<Eigen::Dynamic> swap_blocks(const JetLayout& l) {
    Eigen::VectorXi idx(l.slots());
    for (int i = 0; i < l.slots(); ++i) idx(i) = l.complex ? (i + l.block()) % l.slots() : i;
    return Eigen::PermutationMatrix<Eigen::Dynamic>(idx);
}

double metric(int mu, int axes, bool time_last) {
    if (time_last) return mu == axes - 1 ? -1.0 : 1.0;
    return MetricSignature::eta(mu, mu);
}

}  // namespace

bool QuadraticLagrangian::is_real_valued(double tol) const {
    if (std::abs(c_.imag()) > tol) return false;
    const auto P = swap_blocks(layout_);
    const Eigen::VectorXcd pb = P * b_;
    const Eigen::MatrixXcd ph = P * h_ * P.transpose();
    return (b_.conjugate() - pb).cwiseAbs().maxCoeff() <= tol && (h_.conjugate() - ph).cwiseAbs().maxCoeff() <= tol;
}

QuadraticLagrangian QuadraticLagrangian::klein_gordon(int axes, double m, bool time_last) {
    QuadraticLagrangian L({1, axes, false});
    L.set_hessian(L.layout().value(0), L.layout().value(0), -m * m);
    for (int mu = 0; mu < axes; ++mu)
        L.set_hessian(L.layout().deriv(0, mu), L.layout().deriv(0, mu), -metric(mu, axes, time_last));
    return L;
}

QuadraticLagrangian QuadraticLagrangian::klein_gordon_complex(int axes, double m, bool time_last) {
    QuadraticLagrangian L({1, axes, true});
    const auto& l = L.layout();
    L.set_hessian(l.value(0), l.value(0, true), -m * m);
    for (int mu = 0; mu < axes; ++mu) L.set_hessian(l.deriv(0, mu), l.deriv(0, mu, true), -metric(mu, axes, time_last));
    return L;
}

QuadraticLagrangian QuadraticLagrangian::random(const JetLayout& layout, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    QuadraticLagrangian L(layout);
    L.c_ = u(g);
    if (!layout.complex) {
        for (int i = 0; i < layout.slots(); ++i) {
            L.b_(i) = u(g);
            for (int j = i; j < layout.slots(); ++j) L.set_hessian(i, j, u(g));
        }
        return L;
    }
    const int n = layout.block();
    auto cz = [&] { return Complex(u(g), u(g)); };
    for (int i = 0; i < n; ++i) {
        L.b_(i) = cz();
        L.b_(n + i) = std::conj(L.b_(i));
    }
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const Complex a = cz();
            L.set_hessian(i, j, a);
            L.set_hessian(n + i, n + j, std::conj(a));
        }
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            // H(plain_i, conj_j) = B_ij with B hermitian
            const Complex bij = i == j ? Complex(u(g)) : cz();
            L.h_(i, n + j) = bij;
            L.h_(n + j, i) = bij;
            L.h_(j, n + i) = std::conj(bij);
            L.h_(n + i, j) = std::conj(bij);
        }
    return L;
}

namespace {

nlohmann::json complex_json(Complex v) { return v.imag() == 0.0 ? nlohmann::json(v.real()) : nlohmann::json{v.real(), v.imag()}; }

Complex complex_from(const nlohmann::json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
    throw ConfigError("coefficient must be a number or [re, im]");
}

}  // namespace

std::string QuadraticLagrangian::serialize() const {
    nlohmann::ordered_json j;
    j["components"] = layout_.components;
    j["axes"] = layout_.axes;
    j["complex"] = layout_.complex;
    j["constant"] = complex_json(c_);
    nlohmann::json lin = nlohmann::json::array(), hes = nlohmann::json::array();
    for (int i = 0; i < layout_.slots(); ++i) {
        lin.push_back(complex_json(b_(i)));
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < layout_.slots(); ++k) row.push_back(complex_json(h_(i, k)));
        hes.push_back(row);
    }
    j["linear"] = lin;
    j["hessian"] = hes;
    return j.dump();
}

QuadraticLagrangian QuadraticLagrangian::parse(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("Lagrangian table: ") + e.what());
    }
    for (auto it = j.begin(); it != j.end(); ++it)
        if (it.key() != "components" && it.key() != "axes" && it.key() != "complex" && it.key() != "constant" &&
            it.key() != "linear" && it.key() != "hessian")
            throw ConfigError("unknown Lagrangian key '" + it.key() + "'");
    JetLayout l;
    try {
        l.components = j.value("components", 1);
        l.axes = j.value("axes", 1);
        l.complex = j.value("complex", false);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("Lagrangian layout: ") + e.what());
    }
    QuadraticLagrangian L(l);
    if (j.contains("constant")) L.c_ = complex_from(j["constant"]);
    if (j.contains("linear")) {
        if (!j["linear"].is_array() || static_cast<int>(j["linear"].size()) != l.slots())
            throw ConfigError("linear needs " + std::to_string(l.slots()) + " entries");
        for (int i = 0; i < l.slots(); ++i) L.b_(i) = complex_from(j["linear"][static_cast<std::size_t>(i)]);
    }
    if (j.contains("hessian")) {
        const auto& h = j["hessian"];
        if (!h.is_array() || static_cast<int>(h.size()) != l.slots()) throw ConfigError("hessian needs one row per slot");
        for (int i = 0; i < l.slots(); ++i) {
            const auto& row = h[static_cast<std::size_t>(i)];
            if (!row.is_array() || static_cast<int>(row.size()) != l.slots()) throw ConfigError("hessian rows must be square");
            for (int k = 0; k < l.slots(); ++k) L.h_(i, k) = complex_from(row[static_cast<std::size_t>(k)]);
        }
        if ((L.h_ - L.h_.transpose()).cwiseAbs().maxCoeff() > 0.0) throw ConfigError("hessian must be symmetric");
    }
    return L;
}

namespace {

template <class Scalar>
Complex cplx(Scalar v) {
    return Complex(v);
}

/// Jet column at one point; `time` supplies the last derivative slot when given.
template <class Scalar>
Eigen::VectorXcd jet_at(const JetLayout& l, const LatticeField<Scalar>& f, const Point& p, int lattice_axes,
                        const LatticeField<Scalar>* time) {
    Eigen::VectorXcd z(l.slots());
    for (int c = 0; c < l.components; ++c) {
        z(l.value(c)) = cplx(f.at(c, p));
        for (int mu = 0; mu < lattice_axes; ++mu) z(l.deriv(c, mu)) = cplx(diff_at(f, c, mu, DiffKind::WeightedMean, p));
        if (time) z(l.deriv(c, l.axes - 1)) = cplx(time->at(c, p));
    }
    if (l.complex) z.tail(l.block()) = z.head(l.block()).conjugate();
    return z;
}

template <class Scalar>
void require_layout(const JetLayout& l, const LatticeField<Scalar>& f, int axes) {
    if (l.components != f.components())
        throw ComponentError("Lagrangian has " + std::to_string(l.components) + " components, field " +
                             std::to_string(f.components()));
    if (l.axes != axes)
        throw DimensionError("Lagrangian has " + std::to_string(l.axes) + " derivative slots, the representation needs " +
                             std::to_string(axes));
}

void require_storage(const LatticeDomain& fd, const LatticeDomain& d) {
    if (d.dim() != fd.dim()) throw DimensionError("summation domain and field differ in dimension");
    for (int a = 0; a < d.dim(); ++a) {
        if (d.lower(a) < fd.lower(a) || d.upper(a) > fd.upper(a))
            throw HaloMissing("summation range on axis " + std::to_string(a + 1) + " needs one stored layer beyond it");
    }
}

template <class Scalar>
LatticeField<Complex> residual_from_gradient(const JetLayout& l, const LatticeDomain& d, const Eigen::MatrixXcd& G,
                                             const Eigen::MatrixXcd* Gt, ELForm form, int lattice_axes) {
    if (form == ELForm::Conjugate && !l.complex) throw ComponentError("conjugate equations need a complex Lagrangian");
    const bool conj = form == ELForm::Conjugate;
    LatticeField<Complex> r(d, l.components);
    for (int c = 0; c < l.components; ++c) {
        Eigen::VectorXcd acc = G.row(l.value(c, conj)).transpose();
        for (int mu = 0; mu < lattice_axes; ++mu) {
            ComplexField g(d, 1);
            g.set_hull_values(G.row(l.deriv(c, mu, conj)).transpose());
            acc -= diff(g, mu, DiffKind::WeightedMean).hull_values();
        }
        if (Gt) acc -= Gt->row(l.deriv(c, l.axes - 1, conj)).transpose();
        r.set_hull_values(acc, c);
    }
    d.for_each_point([&](const Point& p) {
        if (!d.is_interior(p))
            for (int c = 0; c < l.components; ++c) r.ref(c, p) = 0.0;
    });
    return r;
}

template <class Scalar>
Eigen::MatrixXcd gradient_matrix(const QuadraticLagrangian& L, const Eigen::MatrixXcd& Z) {
    return (L.hessian() * Z).colwise() + L.linear();
}

}  // namespace

template <class Scalar>
Eigen::MatrixXcd jet_matrix(const JetLayout& layout, const LatticeField<Scalar>& f, const LatticeDomain& d) {
    Eigen::MatrixXcd Z(layout.slots(), static_cast<Eigen::Index>(d.hull_size()));
    Eigen::Index k = 0;
    d.for_each_point([&](const Point& p) { Z.col(k++) = jet_at<Scalar>(layout, f, p, layout.axes, nullptr); });
    return Z;
}

template <class Scalar>
Eigen::MatrixXcd jet_matrix(const JetLayout& layout, const LatticeField<Scalar>& f, const LatticeField<Scalar>& dt_f) {
    const auto& d = f.domain();
    require_layout(layout, f, d.dim() + 1);
    if (!dt_f.same_shape(f)) throw DomainMismatch("time derivative must match the field");
    Eigen::MatrixXcd Z(layout.slots(), static_cast<Eigen::Index>(d.hull_size()));
    Eigen::Index k = 0;
    d.for_each_point([&](const Point& p) { Z.col(k++) = jet_at<Scalar>(layout, f, p, d.dim(), &dt_f); });
    return Z;
}

template <class Scalar>
ActionValue action(const QuadraticLagrangian& L, const LatticeField<Scalar>& f, const LatticeDomain& d) {
    require_layout(L.layout(), f, d.dim());
    require_storage(f.domain(), d);
    ActionValue a;
    a.domain = d;
    a.rep = ActionRep::SumA;
    d.for_each_point([&](const Point& p) { a.value += L.value(jet_at<Scalar>(L.layout(), f, p, d.dim(), nullptr)); });
    return a;
}

template <class Scalar>
ActionValue action(const QuadraticLagrangian& L, const LatticeField<Scalar>& f) {
    return action(L, f, f.domain());
}

template <class Scalar>
ActionValue action(const QuadraticLagrangian& L, const TimeSeries<Scalar>& s) {
    if (s.t.size() < 2) throw QuadratureWindowError("need at least two snapshots");
    if (s.f.size() != s.t.size() || s.dt_f.size() != s.t.size())
        throw QuadratureWindowError("snapshot, derivative and time counts differ");
    const double dt = s.t[1] - s.t[0];
    if (!(dt > 0.0)) throw QuadratureWindowError("times must increase");
    for (std::size_t k = 1; k < s.t.size(); ++k)
        if (std::abs((s.t[k] - s.t[k - 1]) - dt) > 1e-9 * dt) throw QuadratureWindowError("time grid is not uniform");
    const auto& d = s.f.front().domain();
    require_layout(L.layout(), s.f.front(), d.dim() + 1);
    ActionValue a;
    a.domain = d;
    a.rep = ActionRep::SumIntegralB;
    a.dt = dt;
    for (std::size_t k = 0; k < s.t.size(); ++k) {
        if (!(s.f[k].domain() == d) || !(s.dt_f[k].domain() == d)) throw DomainMismatch("snapshots on different domains");
        Complex slice{};
        d.for_each_point([&](const Point& p) { slice += L.value(jet_at<Scalar>(L.layout(), s.f[k], p, d.dim(), &s.dt_f[k])); });
        const double w = (k == 0 || k + 1 == s.t.size()) ? 0.5 * dt : dt;
        a.value += w * slice;
    }
    return a;
}

template <class Scalar>
LatticeField<Complex> euler_lagrange_residual(const QuadraticLagrangian& L, const LatticeField<Scalar>& f, ELForm form) {
    const auto& d = f.domain();
    require_layout(L.layout(), f, d.dim());
    const Eigen::MatrixXcd G = gradient_matrix<Scalar>(L, jet_matrix(L.layout(), f, d));
    return residual_from_gradient<Scalar>(L.layout(), d, G, nullptr, form, d.dim());
}

template <class Scalar>
LatticeField<Complex> euler_lagrange_residual(const QuadraticLagrangian& L, const LatticeField<Scalar>& f,
                                              const LatticeField<Scalar>& dt_f, const LatticeField<Scalar>& dt2_f,
                                              ELForm form) {
    const auto& d = f.domain();
    require_layout(L.layout(), f, d.dim() + 1);
    if (!dt_f.same_shape(f) || !dt2_f.same_shape(f)) throw DomainMismatch("time derivatives must match the field");
    const auto& l = L.layout();
    const auto n = static_cast<Eigen::Index>(d.hull_size());
    Eigen::MatrixXcd Z(l.slots(), n), Zt(l.slots(), n);
    Eigen::Index k = 0;
    d.for_each_point([&](const Point& p) {
        Z.col(k) = jet_at<Scalar>(l, f, p, d.dim(), &dt_f);
        Zt.col(k) = jet_at<Scalar>(l, dt_f, p, d.dim(), &dt2_f);
        ++k;
    });
    const Eigen::MatrixXcd G = gradient_matrix<Scalar>(L, Z);
    const Eigen::MatrixXcd Gt = L.hessian() * Zt;  // d/dt (b + H z)
    return residual_from_gradient<Scalar>(l, d, G, &Gt, form, d.dim());
}

template <class Scalar>
GradientCheck action_gradient_check(const QuadraticLagrangian& L, const LatticeField<Scalar>& f,
                                    const std::vector<Point>& probes, double h, ELForm form) {
    const auto& d = f.domain();
    for (const auto& m : probes)
        if (!d.is_interior(m)) throw ProbeOnBoundary("probe " + to_string(m, d.dim()) + " is not interior");
    if (!(h > 0.0)) throw RangeError("gradient step must be positive");
    const LatticeField<Complex> el = euler_lagrange_residual(L, f, form);
    GradientCheck out;
    double scale = 0.0;
    for (const auto& m : probes) {
        for (int c = 0; c < f.components(); ++c) {
            auto shifted_action = [&](Scalar delta) {
                LatticeField<Scalar> g = f;
                g.ref(c, m) += delta;
                return action(L, g).value;
            };
            Complex num;
            if constexpr (std::is_same_v<Scalar, double>) {
                num = (shifted_action(h) - shifted_action(-h)) / (2.0 * h);
            } else {
                const Complex dre = (shifted_action(Complex(h)) - shifted_action(Complex(-h))) / (2.0 * h);
                const Complex dim = (shifted_action(Complex(0.0, h)) - shifted_action(Complex(0.0, -h))) / (2.0 * h);
                const Complex i(0.0, 1.0);
                num = form == ELForm::Plain ? 0.5 * (dre - i * dim) : 0.5 * (dre + i * dim);
            }
            const Complex ref = el.at(c, m);
            out.max_abs = std::max(out.max_abs, std::abs(num - ref));
            scale = std::max(scale, std::abs(ref));
            ++out.probes;
        }
    }
    out.deviation = scale > 0.0 ? out.max_abs / scale : out.max_abs;
    return out;
}

std::vector<Point> boundary_indicator_points(const LatticeDomain& d) {
    std::vector<Point> pts;
    d.for_each_point([&](const Point& p) {
        if (d.is_boundary(p)) pts.push_back(p);
    });
    for (const auto& face : boundary_faces(d)) {
        for (const auto& p : face.points) {
            const Point q = shifted(p, face.axis, face.side == Side::Plus ? 1 : -1);
            if (q[static_cast<std::size_t>(face.axis)] >= 0) pts.push_back(q);
        }
    }
    return pts;
}

BoundaryAudit boundary_term_audit(const QuadraticLagrangian& L, const RealField& f, const RealField& h,
                                  LedgerVariant variant) {
    const auto& d = f.domain();
    if (d.dim() != 2) throw DimensionError("the boundary ledger is written for two axes");
    if (!(h.domain() == d) || h.components() != 1 || f.components() != 1)
        throw DomainMismatch("f and h must be scalar fields on the same domain");
    if (L.layout().components != 1 || L.layout().axes != 2 || L.layout().complex)
        throw DimensionError("the ledger needs a real scalar Lagrangian with two derivative slots");
    for (int a = 0; a < 2; ++a)
        if (d.extent(a) < 3) throw RangeError("the ledger needs at least three points per axis");
    d.for_each_point([&](const Point& p) {
        if (d.is_interior(p) && h.at(p) != 0.0)
            throw InteriorVariation("variation is nonzero at interior point " + to_string(p, 2));
    });

    BoundaryAudit out;
    // exact for a quadratic action: A(f + h) - A(f - h) = 2 dA[h]
    out.direct = 0.5 * (action(L, f + h).value - action(L, f - h).value).real();

    const JetLayout& l = L.layout();
    auto grad = [&](int slot, int n1, int n2) {
        const Point p{n1, n2, 0, 0};
        return L.gradient(jet_at<double>(l, f, p, 2, nullptr))(slot).real();
    };
    auto Ly = [&](int n1, int n2) { return grad(l.value(0), n1, n2); };
    auto g1 = [&](int n1, int n2) { return grad(l.deriv(0, 0), n1, n2); };
    auto g2 = [&](int n1, int n2) { return grad(l.deriv(0, 1), n1, n2); };
    auto D1g1 = [&](int n1, int n2) { return (std::sqrt(n1 + 1.0) * g1(n1 + 1, n2) - std::sqrt(double(n1)) * g1(n1 - 1, n2)) / std::sqrt(2.0); };
    auto D2g2 = [&](int n1, int n2) { return (std::sqrt(n2 + 1.0) * g2(n1, n2 + 1) - std::sqrt(double(n2)) * g2(n1, n2 - 1)) / std::sqrt(2.0); };
    auto H = [&](int n1, int n2) { return n1 < 0 || n2 < 0 ? 0.0 : h.at({n1, n2, 0, 0}); };
    auto rt = [](double x) { return std::sqrt(x / 2.0); };

    const bool printed = variant == LedgerVariant::AsPrinted;
    const int N11 = d.lower(0), N21 = d.upper(0), N12 = d.lower(1), N22 = d.upper(1);
    double s = 0.0;
    for (int k = 0; k <= N21 - N11; ++k) s -= rt(N12) * g2(N11 + k, N12) * H(N11 + k, N12 - 1);
    for (int k = 0; k <= N22 - N12; ++k) s += rt(N21 + 1.0) * g1(printed ? N21 + 1 : N21, N12 + k) * H(N21 + 1, N12 + k);
    for (int k = 0; k <= N21 - N11; ++k) s += rt(N22 + 1.0) * g2(N11 + k, N22) * H(N11 + k, N22 + 1);
    for (int k = 0; k <= N22 - N12; ++k) s -= rt(N11) * g1(N11, N12 + k) * H(N11 - 1, N12 + k);
    for (int j = 1; j <= N21 - N11 - 1; ++j)
        s += (Ly(N11 + j, N12) - D1g1(N11 + j, N12) - rt(N12 + 1.0) * g2(N11 + j, N12 + 1)) * H(N11 + j, N12);
    for (int j = 1; j <= (printed ? N22 - N11 - 1 : N22 - N12 - 1); ++j)
        s += (Ly(N21, N12 + j) + rt(N21) * g1(N21 - 1, N12 + j) - D2g2(N21, N12 + j)) * H(N21, N12 + j);
    for (int j = 1; j <= N21 - N11 - 1; ++j)
        s += (Ly(N11 + j, N22) - D1g1(N11 + j, N22) + rt(N22) * g2(N11 + j, printed ? N22 : N22 - 1)) * H(N11 + j, N22);
    for (int j = 1; j <= N22 - N12 - 1; ++j)
        s += (Ly(N11, N12 + j) - rt(N11 + 1.0) * g1(N11 + 1, N12 + j) - D2g2(N11, N12 + j)) * H(N11, N12 + j);
    const double r2 = std::sqrt(2.0);
    s += (Ly(N11, N12) - (std::sqrt(N11 + 1.0) * g1(N11 + 1, N12) + std::sqrt(N12 + 1.0) * g2(N11, N12 + 1)) / r2) * H(N11, N12);
    {
        const double bracket = (std::sqrt(double(N21)) * g1(N21 - 1, N12) - std::sqrt(N12 + 1.0) * g2(N21, N12 + 1)) / r2;
        s += (Ly(N21, N12) + (printed ? -bracket : bracket)) * H(N21, N12);
    }
    s += (Ly(N21, N22) + (std::sqrt(double(N21)) * g1(N21 - 1, N22) + std::sqrt(double(N22)) * g2(N21, N22 - 1)) / r2) * H(N21, N22);
    s += (Ly(N11, N22) - (std::sqrt(N11 + 1.0) * g1(N11 + 1, N22) - std::sqrt(double(N22)) * g2(N11, N22 - 1)) / r2) * H(N11, N22);
    out.ledger = s;
    return out;
}

std::vector<ProbeValue> dubois_reymond_probe(const RealField& g) {
    const auto& d = g.domain();
    std::vector<ProbeValue> out;
    d.for_each_point([&](const Point& m) {
        if (!d.is_interior(m)) return;
        double pairing = 0.0;
        d.for_each_point([&](const Point& n) {
            if (d.is_interior(n)) pairing += g.at(n) * (n == m ? 1.0 : 0.0);
        });
        out.push_back({m, pairing});
    });
    return out;
}

#define DPS_VARIATIONAL_INSTANTIATE(S)                                                                                 \
    template Eigen::MatrixXcd jet_matrix(const JetLayout&, const LatticeField<S>&, const LatticeDomain&);             \
    template Eigen::MatrixXcd jet_matrix(const JetLayout&, const LatticeField<S>&, const LatticeField<S>&);           \
    template ActionValue action(const QuadraticLagrangian&, const LatticeField<S>&);                                  \
    template ActionValue action(const QuadraticLagrangian&, const LatticeField<S>&, const LatticeDomain&);            \
    template ActionValue action(const QuadraticLagrangian&, const TimeSeries<S>&);                                    \
    template LatticeField<Complex> euler_lagrange_residual(const QuadraticLagrangian&, const LatticeField<S>&, ELForm); \
    template LatticeField<Complex> euler_lagrange_residual(const QuadraticLagrangian&, const LatticeField<S>&,        \
                                                           const LatticeField<S>&, const LatticeField<S>&, ELForm);   \
    template GradientCheck action_gradient_check(const QuadraticLagrangian&, const LatticeField<S>&,                 \
                                                 const std::vector<Point>&, double, ELForm);

DPS_VARIATIONAL_INSTANTIATE(double)
DPS_VARIATIONAL_INSTANTIATE(Complex)

}  // namespace dps
