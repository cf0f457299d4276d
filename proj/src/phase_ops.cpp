#include "dps/phase_ops.hpp"

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

namespace dps {

std::string to_string(OpKind k) {
    switch (k) {
        case OpKind::DeltaRight: return "delta-right";
        case OpKind::DeltaLeft: return "delta-left";
        case OpKind::DeltaSharp: return "delta-sharp";
        case OpKind::P: return "P";
        case OpKind::Q: return "Q";
        case OpKind::SqrtIndex: return "sqrt-index";
        case OpKind::Identity: return "identity";
    }
    return "?";
}

std::string to_string(Rep r) { return r == Rep::DifferenceRep ? "difference" : "difference-differential"; }

Eigen::MatrixXd real_op(OpKind kind, int size, int first) {
    if (size < 2) throw SizeError("operator size must be at least 2, got " + std::to_string(size));
    if (first < 0) throw SizeError("negative first index");
    using M = Eigen::MatrixXd;
    const double r2 = std::sqrt(2.0);
    M m = M::Zero(size, size);
    switch (kind) {
        case OpKind::DeltaRight:
            for (int i = 0; i < size; ++i) {
                m(i, i) = -1.0;
                if (i + 1 < size) m(i, i + 1) = 1.0;
            }
            break;
        case OpKind::DeltaLeft:
            for (int i = 0; i < size; ++i) {
                m(i, i) = 1.0;
                if (i > 0) m(i, i - 1) = -1.0;
            }
            break;
        case OpKind::DeltaSharp:
            for (int i = 0; i < size; ++i) {
                const double n = first + i;
                if (i + 1 < size) m(i, i + 1) = std::sqrt(n + 1.0) / r2;
                if (i > 0) m(i, i - 1) = -std::sqrt(n) / r2;
            }
            break;
        case OpKind::SqrtIndex:
            for (int i = 0; i < size; ++i) m(i, i) = std::sqrt(static_cast<double>(first + i));
            break;
        case OpKind::Identity:
            m.setIdentity();
            break;
        case OpKind::Q: {
            // (1/sqrt2) (D sqrt(n) - sqrt(n) D' + 2 sqrt(n))
            const M R = real_op(OpKind::DeltaRight, size, first);
            const M L = real_op(OpKind::DeltaLeft, size, first);
            const M S = real_op(OpKind::SqrtIndex, size, first);
            m = (R * S - S * L + 2.0 * S) / r2;
            break;
        }
        case OpKind::P:
            throw SizeError("P is imaginary; use op_matrix");
    }
    return m;
}

OperatorMatrix op_matrix(OpKind kind, int size, int first) {
    OperatorMatrix out;
    out.label = to_string(kind);
    out.first = first;
    if (kind == OpKind::P)
        out.entries = Complex(0.0, -1.0) * real_op(OpKind::DeltaSharp, size, first).cast<Complex>();
    else
        out.entries = real_op(kind, size, first).cast<Complex>();
    return out;
}

CommutatorReport commutator_check(const OperatorMatrix& P, const OperatorMatrix& Q, int inset, double eta) {
    if (P.size() != Q.size())
        throw SizeMismatch("P has size " + std::to_string(P.size()) + ", Q has size " + std::to_string(Q.size()));
    const int n = P.size();
    const Eigen::MatrixXcd c = Q.entries * P.entries - P.entries * Q.entries;
    const int lo = P.first > 0 ? inset : 0;
    const int hi = n - 1 - inset;
    CommutatorReport r;
    for (int i = lo; i <= hi; ++i) {
        ++r.rows_checked;
        for (int j = lo; j <= hi; ++j) {
            const Complex want = i == j ? Complex(0.0, eta) : Complex(0.0);
            r.deviation = std::max(r.deviation, std::abs(c(i, j) - want));
        }
    }
    return r;
}

Spectrum spectrum(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols()) throw SizeError("spectrum needs a square matrix");
    const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (asym > 1e-12 * scale) throw NotHermitian("max |M - M^H| = " + std::to_string(asym));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    if (es.info() != Eigen::Success) throw ConvergenceError("self-adjoint eigensolver did not converge");
    return {es.eigenvalues(), es.eigenvectors()};
}

Spectrum spectrum(const OperatorMatrix& m) { return spectrum(m.entries); }

PoincareParams PoincareParams::translation(int axis, double value) {
    PoincareParams p;
    p.eps[static_cast<std::size_t>(axis)] = value;
    return p;
}

PoincareParams PoincareParams::rotation(int mu, int nu, double value) {
    PoincareParams p;
    p.eps2(mu, nu) = value;
    p.eps2(nu, mu) = -value;
    return p;
}

PoincareParams PoincareParams::scaled(double s) const {
    PoincareParams p = *this;
    for (auto& e : p.eps) e *= s;
    p.eps2 *= s;
    return p;
}

PoincareParams PoincareParams::operator+(const PoincareParams& o) const {
    PoincareParams p = *this;
    for (std::size_t i = 0; i < 4; ++i) p.eps[i] += o.eps[i];
    p.eps2 += o.eps2;
    return p;
}

bool PoincareParams::is_zero() const {
    for (double e : eps)
        if (e != 0.0) return false;
    return eps2.isZero(0.0);
}

bool PoincareParams::has_boost() const {
    for (int a = 0; a < 3; ++a)
        if (eps2(a, 3) != 0.0 || eps2(3, a) != 0.0) return true;
    return false;
}

namespace {

Eigen::Matrix4d eta_matrix() {
    Eigen::Matrix4d e = Eigen::Matrix4d::Zero();
    for (int i = 0; i < 4; ++i) e(i, i) = MetricSignature::eta(i, i);
    return e;
}

}  // namespace

FinitePoincare FinitePoincare::from_lorentz(const Eigen::Matrix4d& ell, const std::array<double, 4>& a) {
    FinitePoincare f;
    f.a = a;
    // eta is its own inverse
    f.omega = (ell - Eigen::Matrix4d::Identity()) * eta_matrix();
    return f;
}

Eigen::Matrix4d FinitePoincare::constraint() const {
    const Eigen::Matrix4d eta = eta_matrix();
    const Eigen::Matrix4d w = omega * eta;  // omega^mu_nu
    const Eigen::Matrix4d low = eta * w;    // omega_{alpha beta}
    return low + low.transpose() + w.transpose() * eta * w;
}

PoincareParams FinitePoincare::generator_params() const {
    PoincareParams p;
    p.eps = a;
    p.eps2 = 0.5 * (omega - omega.transpose());
    return p;
}

Eigen::Matrix4d lorentz_rotation(int mu, int nu, double angle) {
    if (mu == nu || mu > 2 || nu > 2 || mu < 0 || nu < 0) throw AxisError("rotation needs two distinct spatial axes");
    Eigen::Matrix4d l = Eigen::Matrix4d::Identity();
    l(mu, mu) = std::cos(angle);
    l(nu, nu) = std::cos(angle);
    l(mu, nu) = -std::sin(angle);
    l(nu, mu) = std::sin(angle);
    return l;
}

Eigen::Matrix4d lorentz_boost(int a, double rapidity) {
    if (a < 0 || a > 2) throw AxisError("boost axis must be spatial");
    Eigen::Matrix4d l = Eigen::Matrix4d::Identity();
    l(a, a) = std::cosh(rapidity);
    l(3, 3) = std::cosh(rapidity);
    l(a, 3) = std::sinh(rapidity);
    l(3, a) = std::sinh(rapidity);
    return l;
}

SpinBlock SpinBlock::scalar() {
    SpinBlock s;
    s.components = 1;
    for (auto& row : s.S)
        for (auto& m : row) m = Eigen::MatrixXcd::Zero(1, 1);
    return s;
}

SpinBlock SpinBlock::vector() {
    SpinBlock s;
    s.components = 4;
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
            Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
            for (int al = 0; al < 4; ++al)
                for (int be = 0; be < 4; ++be)
                    m(al, be) = double(MetricSignature::eta(nu, be) * (al == mu) - MetricSignature::eta(mu, be) * (al == nu));
            s.S[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)] = m;
        }
    return s;
}

OperatorMatrix axis_op(const LatticeDomain& d, int axis, OpKind kind) {
    if (axis < 0 || axis >= d.dim()) throw AxisError("axis " + std::to_string(axis + 1) + " not in the domain");
    return op_matrix(kind, d.extent(axis), d.lower(axis));
}

namespace {

Eigen::MatrixXcd eye(Eigen::Index n) { return Eigen::MatrixXcd::Identity(n, n); }

/// Kronecker product of per-axis factors, the last axis outermost.
Eigen::MatrixXcd kron_axes(const LatticeDomain& d, const std::vector<Eigen::MatrixXcd>& factors) {
    Eigen::MatrixXcd out = factors[0];
    for (int a = 1; a < d.dim(); ++a) {
        Eigen::MatrixXcd next = Eigen::kroneckerProduct(factors[static_cast<std::size_t>(a)], out);
        out.swap(next);
    }
    return out;
}

}  // namespace

Eigen::MatrixXcd embed(const LatticeDomain& d, int axis, const Eigen::MatrixXcd& a) {
    std::vector<Eigen::MatrixXcd> f;
    for (int k = 0; k < d.dim(); ++k) f.push_back(k == axis ? a : eye(d.extent(k)));
    return kron_axes(d, f);
}

Eigen::MatrixXcd embed_pair(const LatticeDomain& d, int axis_a, const Eigen::MatrixXcd& a, int axis_b,
                            const Eigen::MatrixXcd& b) {
    if (axis_a == axis_b) return embed(d, axis_a, a * b);
    std::vector<Eigen::MatrixXcd> f;
    for (int k = 0; k < d.dim(); ++k) f.push_back(k == axis_a ? a : k == axis_b ? b : eye(d.extent(k)));
    return kron_axes(d, f);
}

GeneratorMatrix generator_matrix(const PoincareParams& params, Rep rep, const SpinBlock& spin,
                                 const LatticeDomain& domain, BoostForm boost, int time_axis) {
    for (const auto& row : spin.S)
        for (const auto& m : row)
            if (m.rows() != spin.components || m.cols() != spin.components)
                throw SpinShapeError("spin matrices must be " + std::to_string(spin.components) + " x " +
                                     std::to_string(spin.components));
    const int dim = domain.dim();
    // lattice axes carrying the orbital part
    const int lattice_axes = rep == Rep::DifferenceRep ? 4 : 3;
    if (rep == Rep::DiffDiffRep && dim > 3) throw AxisError("difference-differential domains have at most 3 axes");
    auto require_axis = [&](int a) {
        if (a >= dim) throw AxisError("parameter acts on axis " + std::to_string(a + 1) + " of a " + std::to_string(dim) + "D domain");
    };

    const auto npts = static_cast<Eigen::Index>(domain.hull_size());
    Eigen::MatrixXcd orbital = Eigen::MatrixXcd::Zero(npts, npts);
    Eigen::MatrixXcd orbital_t = Eigen::MatrixXcd::Zero(npts, npts);
    Eigen::MatrixXcd orbital_dt = Eigen::MatrixXcd::Zero(npts, npts);
    bool any_t = false, any_dt = false;

    std::vector<Eigen::MatrixXcd> D(static_cast<std::size_t>(dim)), Q(static_cast<std::size_t>(dim));
    for (int a = 0; a < dim; ++a) {
        D[static_cast<std::size_t>(a)] = axis_op(domain, a, OpKind::DeltaSharp).entries;
        Q[static_cast<std::size_t>(a)] = axis_op(domain, a, OpKind::Q).entries;
    }
    auto Dm = [&](int a) -> const Eigen::MatrixXcd& { return D[static_cast<std::size_t>(a)]; };
    auto Qm = [&](int a) -> const Eigen::MatrixXcd& { return Q[static_cast<std::size_t>(a)]; };

    // translations: -eps^mu D_mu
    for (int mu = 0; mu < 4; ++mu) {
        const double e = params.eps[static_cast<std::size_t>(mu)];
        if (e == 0.0) continue;
        if (mu < lattice_axes) {
            require_axis(mu);
            orbital -= e * embed(domain, mu, Dm(mu));
        } else {
            orbital_dt -= e * Eigen::MatrixXcd::Identity(npts, npts);
            any_dt = true;
        }
    }

    // lattice rotations: (1/4) e^{mu nu} (Q_mu D_nu - Q_nu D_mu + D_nu Q_mu - D_mu Q_nu).
    // The lattice position operator X obeys [X, P] = i on every axis, while the
    // generator needs [Q_mu, P_nu] = i eta_{mu nu}; FromGenerator takes Q_4 = -X_4.
    auto qs = [&](int a) { return boost == BoostForm::FromGenerator && a == time_axis ? -1.0 : 1.0; };
    for (int mu = 0; mu < lattice_axes; ++mu)
        for (int nu = 0; nu < lattice_axes; ++nu) {
            const double e = params.eps2(mu, nu);
            if (e == 0.0 || mu == nu) continue;
            require_axis(mu);
            require_axis(nu);
            orbital += 0.25 * e *
                       (qs(mu) * (embed_pair(domain, mu, Qm(mu), nu, Dm(nu)) + embed_pair(domain, nu, Dm(nu), mu, Qm(mu))) -
                        qs(nu) * (embed_pair(domain, nu, Qm(nu), mu, Dm(mu)) + embed_pair(domain, mu, Dm(mu), nu, Qm(nu))));
        }

    // time boosts in the difference-differential representation
    if (rep == Rep::DiffDiffRep) {
        const double r2 = std::sqrt(2.0);
        for (int a = 0; a < 3; ++a) {
            const double k = 0.5 * (params.eps2(a, 3) - params.eps2(3, a));
            if (k == 0.0) continue;
            require_axis(a);
            any_t = any_dt = true;
            if (boost == BoostForm::AsPrinted) {
                const Eigen::MatrixXcd W = r2 * Qm(a) - 2.0 * axis_op(domain, a, OpKind::SqrtIndex).entries;
                orbital_dt -= (k / r2) * embed(domain, a, W);
                orbital_t += (k / r2) * embed(domain, a, Dm(a));
            } else {
                orbital_dt -= k * embed(domain, a, Qm(a));
                orbital_t -= k * embed(domain, a, Dm(a));
            }
        }
    }

    // spin: (i/2) e^{mu nu} S_{mu nu}
    Eigen::MatrixXcd spin_part = Eigen::MatrixXcd::Zero(spin.components, spin.components);
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu)
            if (params.eps2(mu, nu) != 0.0)
                spin_part += Complex(0.0, 0.5 * params.eps2(mu, nu)) *
                             spin.S[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)];

    const Eigen::MatrixXcd Ic = eye(spin.components);
    GeneratorMatrix g;
    g.constant = Eigen::kroneckerProduct(Ic, orbital);
    if (!spin_part.isZero(0.0)) g.constant += Eigen::kroneckerProduct(spin_part, Eigen::MatrixXcd(eye(npts)));
    g.t_coeff = Eigen::kroneckerProduct(Ic, orbital_t);
    g.dt_coeff = Eigen::kroneckerProduct(Ic, orbital_dt);
    g.time_dependent = any_t;
    g.needs_dt = any_dt;
    return g;
}

}  // namespace dps
