#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "dps/lattice.hpp"

namespace dps {

enum class DiffKind { Right, Left, WeightedMean };

std::string to_string(DiffKind k);

/// (sqrt(n+1) - sqrt(n)) / sqrt(2), the weighted-mean difference of the constant 1.
inline double sharp_of_one(int n) {
    return (std::sqrt(static_cast<double>(n) + 1.0) - std::sqrt(static_cast<double>(n))) / std::sqrt(2.0);
}

inline void check_axis(const LatticeDomain& d, int axis) {
    if (axis < 0 || axis >= d.dim())
        throw AxisError("axis " + std::to_string(axis + 1) + " not in a " + std::to_string(d.dim()) + "D domain");
}

/// Single stencil application at `p`, reading f through the zero extension.
template <class Scalar>
Scalar diff_at(const LatticeField<Scalar>& f, int comp, int axis, DiffKind kind, const Point& p) {
    const int n = p[static_cast<std::size_t>(axis)];
    switch (kind) {
        case DiffKind::Right:
            return f.at(comp, shifted(p, axis, 1)) - f.at(comp, p);
        case DiffKind::Left:
            return f.at(comp, p) - f.at(comp, shifted(p, axis, -1));
        case DiffKind::WeightedMean: {
            const double up = std::sqrt(static_cast<double>(n) + 1.0);
            const double dn = std::sqrt(static_cast<double>(n));
            Scalar r = up * f.at(comp, shifted(p, axis, 1));
            // sqrt(n) = 0 at n = 0; the n = -1 value is never consumed
            if (n > 0) r -= dn * f.at(comp, shifted(p, axis, -1));
            return r / std::sqrt(2.0);
        }
    }
    return Scalar(0);
}

/// Partial difference along `axis`. The result is evaluated on the hull and
/// is zero on the halo, so nested differences act like products of the
/// truncated operator matrices.
template <class Scalar>
LatticeField<Scalar> diff(const LatticeField<Scalar>& f, int axis, DiffKind kind) {
    const auto& d = f.domain();
    check_axis(d, axis);
    LatticeField<Scalar> out(d, f.components());
    for (int c = 0; c < f.components(); ++c)
        d.for_each_point([&](const Point& p) { out.ref(c, p) = diff_at(f, c, axis, kind, p); });
    return out;
}

/// The field n -> Delta#_axis(1)(n) on the hull.
RealField sharp_one_field(const LatticeDomain& d, int axis);

/// n -> sqrt(n^axis), stored on hull and halo.
RealField sqrt_index_field(const LatticeDomain& d, int axis);

template <class Scalar>
LatticeField<Scalar> multiply(const RealField& w, const LatticeField<Scalar>& f) {
    if (!(w.domain() == f.domain())) throw DomainMismatch("weight and field domains differ");
    LatticeField<Scalar> r = f;
    const auto m = w.storage().size();
    for (int c = 0; c < f.components(); ++c)
        r.storage().segment(c * m, m) = f.storage().segment(c * m, m).cwiseProduct(w.storage().template cast<Scalar>());
    return r;
}

enum class LeibnizRule {
    LeibnizRight,          ///< right difference of a product
    LeibnizLeft,           ///< left difference of a product
    LeibnizSharpForward,   ///< weighted mean of a product, f shifted up
    LeibnizSharpBackward,  ///< weighted mean of a product, f shifted down
    SharpSymmetricProduct  ///< right difference of sqrt(n) times the symmetric shifted product
};

enum class MixedRule {
    WeightedSplit,         ///< sqrt(n+1) D phi + sqrt(n) D' phi in terms of D#
    WeightedSplitOfSharp,  ///< the same applied to D#_mu phi along axis nu
    WeightedSquare,        ///< sqrt(n+1) (D phi)^2 - sqrt(n) (D' phi)^2
    WeightedSharpProduct,  ///< squares replaced by products of D#_nu phi and D#_sigma phi
    WeightedPairProduct    ///< two independent fields A, B
};

std::string to_string(LeibnizRule r);
std::string to_string(MixedRule r);

/// Interior: strict interior points only. FullHull: every hull point, with
/// the operands' halo values taken as stored (zero for zero-extended data).
enum class IdentityScope { Interior, FullHull };

struct Residual {
    double max_abs = 0.0;
    double scale = 0.0;  ///< largest term magnitude seen on either side
    double relative() const { return scale > 0.0 ? max_abs / scale : max_abs; }
};

namespace detail {

template <class Scalar>
void accumulate(Residual& r, const Scalar& lhs, const Scalar& rhs, double term_scale) {
    r.max_abs = std::max(r.max_abs, std::abs(lhs - rhs));
    r.scale = std::max({r.scale, std::abs(lhs), std::abs(rhs), term_scale});
}

template <class Scalar>
void require_scalar_pair(const LatticeField<Scalar>& f, const LatticeField<Scalar>& g) {
    if (!(f.domain() == g.domain())) throw DomainMismatch("operands live on different domains");
    if (f.components() != 1 || g.components() != 1) throw ComponentError("identity checks need scalar fields");
}

template <class Fn>
void for_scope(const LatticeDomain& d, IdentityScope scope, Fn&& fn) {
    d.for_each_point([&](const Point& p) {
        if (scope == IdentityScope::Interior && !d.is_interior(p)) return;
        fn(p);
    });
}

}  // namespace detail

/// Max residual of a product rule over the chosen scope.
template <class Scalar>
Residual check_leibniz(const LatticeField<Scalar>& f, const LatticeField<Scalar>& g, int axis, LeibnizRule rule,
                       IdentityScope scope = IdentityScope::Interior) {
    detail::require_scalar_pair(f, g);
    const auto& d = f.domain();
    check_axis(d, axis);
    const LatticeField<Scalar> fg = f * g;
    const double r2 = std::sqrt(2.0);
    Residual res;
    detail::for_scope(d, scope, [&](const Point& p) {
        const Point up = shifted(p, axis, 1), dn = shifted(p, axis, -1);
        const int n = p[static_cast<std::size_t>(axis)];
        Scalar lhs{}, rhs{};
        double ts = 0.0;
        switch (rule) {
            case LeibnizRule::LeibnizRight: {
                lhs = diff_at(fg, 0, axis, DiffKind::Right, p);
                const Scalar a = f.at(up) * diff_at(g, 0, axis, DiffKind::Right, p);
                const Scalar b = g.at(p) * diff_at(f, 0, axis, DiffKind::Right, p);
                rhs = a + b;
                ts = std::max(std::abs(a), std::abs(b));
                break;
            }
            case LeibnizRule::LeibnizLeft: {
                lhs = diff_at(fg, 0, axis, DiffKind::Left, p);
                const Scalar a = f.at(p) * diff_at(g, 0, axis, DiffKind::Left, p);
                const Scalar b = g.at(dn) * diff_at(f, 0, axis, DiffKind::Left, p);
                rhs = a + b;
                ts = std::max(std::abs(a), std::abs(b));
                break;
            }
            case LeibnizRule::LeibnizSharpForward:
            case LeibnizRule::LeibnizSharpBackward: {
                const bool fwd = rule == LeibnizRule::LeibnizSharpForward;
                const Point pf = fwd ? up : dn, pg = fwd ? dn : up;
                lhs = diff_at(fg, 0, axis, DiffKind::WeightedMean, p);
                const Scalar a = f.at(pf) * diff_at(g, 0, axis, DiffKind::WeightedMean, p);
                const Scalar b = g.at(pg) * diff_at(f, 0, axis, DiffKind::WeightedMean, p);
                const Scalar c = f.at(pf) * g.at(pg) * sharp_of_one(n);
                rhs = a + b - c;
                ts = std::max({std::abs(a), std::abs(b), std::abs(c)});
                break;
            }
            case LeibnizRule::SharpSymmetricProduct: {
                // right difference of w(n) = sqrt(n) [f(n) g(n-1) + f(n-1) g(n)]
                auto w = [&](const Point& q) {
                    const int k = q[static_cast<std::size_t>(axis)];
                    if (k <= 0) return Scalar(0);
                    const Point qd = shifted(q, axis, -1);
                    return std::sqrt(static_cast<double>(k)) * (f.at(q) * g.at(qd) + f.at(qd) * g.at(q));
                };
                lhs = w(up) - w(p);
                const Scalar a = f.at(p) * diff_at(g, 0, axis, DiffKind::WeightedMean, p);
                const Scalar b = g.at(p) * diff_at(f, 0, axis, DiffKind::WeightedMean, p);
                rhs = r2 * (a + b);
                ts = std::max({std::abs(w(up)), std::abs(w(p)), r2 * std::abs(a), r2 * std::abs(b)});
                break;
            }
        }
        detail::accumulate(res, lhs, rhs, ts);
    });
    return res;
}

/// Pair-product rule for two independent scalar fields along axis `mu`.
template <class Scalar>
Residual check_mixed_pair(const LatticeField<Scalar>& A, const LatticeField<Scalar>& B, int mu,
                          IdentityScope scope = IdentityScope::Interior) {
    detail::require_scalar_pair(A, B);
    const auto& d = A.domain();
    check_axis(d, mu);
    const double r2 = std::sqrt(2.0);
    const LatticeField<Scalar> AB = A * B;
    Residual res;
    detail::for_scope(d, scope, [&](const Point& p) {
        const int n = p[static_cast<std::size_t>(mu)];
        const Scalar l1 = std::sqrt(n + 1.0) * diff_at(A, 0, mu, DiffKind::Right, p) * diff_at(B, 0, mu, DiffKind::Right, p);
        const Scalar l2 = std::sqrt(static_cast<double>(n)) * diff_at(A, 0, mu, DiffKind::Left, p) *
                          diff_at(B, 0, mu, DiffKind::Left, p);
        const Scalar t1 = diff_at(AB, 0, mu, DiffKind::WeightedMean, p);
        const Scalar t2 = A.at(p) * diff_at(B, 0, mu, DiffKind::WeightedMean, p);
        const Scalar t3 = diff_at(A, 0, mu, DiffKind::WeightedMean, p) * B.at(p);
        const Scalar t4 = A.at(p) * B.at(p) * sharp_of_one(n);
        detail::accumulate(res, l1 - l2, r2 * (t1 - t2 - t3 + t4),
                           std::max({std::abs(l1), std::abs(l2), r2 * std::abs(t1), r2 * std::abs(t2),
                                     r2 * std::abs(t3), r2 * std::abs(t4)}));
    });
    return res;
}

/// Max residual of the weighted-mean splitting rules. `mu` is the outer
/// axis; `nu` (and `sigma`) are the inner axes where a rule needs them and
/// may coincide with `mu`: no index is summed.
template <class Scalar>
Residual check_mixed(const LatticeField<Scalar>& phi, MixedRule rule, int mu, int nu = 0, int sigma = 0,
                     IdentityScope scope = IdentityScope::Interior) {
    if (phi.components() != 1) throw ComponentError("identity checks need scalar fields");
    if (rule == MixedRule::WeightedPairProduct)
        throw AxisError("the pair-product rule takes two fields, use check_mixed_pair");
    const auto& d = phi.domain();
    check_axis(d, mu);
    check_axis(d, nu);
    check_axis(d, sigma);
    const double r2 = std::sqrt(2.0);
    Residual res;

    auto split = [&](const LatticeField<Scalar>& u, const Point& p) {
        // sqrt(n+1) D u + sqrt(n) D' u  vs  sqrt(2) [D# u - u D#(1)]
        const int n = p[static_cast<std::size_t>(mu)];
        const Scalar a = std::sqrt(n + 1.0) * diff_at(u, 0, mu, DiffKind::Right, p);
        const Scalar b = std::sqrt(static_cast<double>(n)) * diff_at(u, 0, mu, DiffKind::Left, p);
        const Scalar c = r2 * diff_at(u, 0, mu, DiffKind::WeightedMean, p);
        const Scalar e = r2 * u.at(p) * sharp_of_one(n);
        detail::accumulate(res, a + b, c - e, std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(e)}));
    };

    switch (rule) {
        case MixedRule::WeightedSplit:
            detail::for_scope(d, scope, [&](const Point& p) { split(phi, p); });
            break;
        case MixedRule::WeightedSplitOfSharp: {
            const auto inner = diff(phi, nu, DiffKind::WeightedMean);
            detail::for_scope(d, scope, [&](const Point& p) { split(inner, p); });
            break;
        }
        case MixedRule::WeightedSquare: {
            const auto sq = phi * phi;
            detail::for_scope(d, scope, [&](const Point& p) {
                const int n = p[static_cast<std::size_t>(mu)];
                const Scalar dr = diff_at(phi, 0, mu, DiffKind::Right, p);
                const Scalar dl = diff_at(phi, 0, mu, DiffKind::Left, p);
                const Scalar l1 = std::sqrt(n + 1.0) * dr * dr;
                const Scalar l2 = std::sqrt(static_cast<double>(n)) * dl * dl;
                const Scalar t1 = diff_at(sq, 0, mu, DiffKind::WeightedMean, p);
                const Scalar t2 = 2.0 * phi.at(p) * diff_at(phi, 0, mu, DiffKind::WeightedMean, p);
                const Scalar t3 = phi.at(p) * phi.at(p) * sharp_of_one(n);
                detail::accumulate(res, l1 - l2, r2 * (t1 - t2 + t3),
                                   std::max({std::abs(l1), std::abs(l2), r2 * std::abs(t1), r2 * std::abs(t2),
                                             r2 * std::abs(t3)}));
            });
            break;
        }
        case MixedRule::WeightedSharpProduct:
            return check_mixed_pair(diff(phi, nu, DiffKind::WeightedMean), diff(phi, sigma, DiffKind::WeightedMean),
                                    mu, scope);
        case MixedRule::WeightedPairProduct:
            break;
    }
    return res;
}

template <class Scalar>
struct TelescopeResult {
    Scalar lhs{};
    Scalar rhs{};
};

/// Both sides of the summation rule for `kind` over n^axis in [n1, n2], summed
/// over the full hull on the transverse axes.
template <class Scalar>
TelescopeResult<Scalar> telescope_sum(const LatticeField<Scalar>& f, int axis, DiffKind kind, int n1, int n2,
                                      int comp = 0) {
    const auto& d = f.domain();
    check_axis(d, axis);
    if (n1 > n2 || n1 < d.lower(axis) || n2 > d.upper(axis))
        throw RangeError("summation range [" + std::to_string(n1) + ", " + std::to_string(n2) +
                         "] not inside the hull on axis " + std::to_string(axis + 1));
    TelescopeResult<Scalar> r;
    d.for_each_point([&](const Point& p) {
        const int n = p[static_cast<std::size_t>(axis)];
        if (n < n1 || n > n2) return;
        r.lhs += diff_at(f, comp, axis, kind, p);
        switch (kind) {
            case DiffKind::Right:
                if (n == n2) r.rhs += f.at(comp, shifted(p, axis, 1));
                if (n == n1) r.rhs -= f.at(comp, p);
                break;
            case DiffKind::Left:
                if (n == n2) r.rhs += f.at(comp, p);
                if (n == n1) r.rhs -= f.at(comp, shifted(p, axis, -1));
                break;
            case DiffKind::WeightedMean: {
                Scalar t{};
                if (n == n2) t += std::sqrt(n2 + 1.0) * f.at(comp, shifted(p, axis, 1));
                if (n == n1 && n1 > 0) t -= std::sqrt(static_cast<double>(n1)) * f.at(comp, shifted(p, axis, -1));
                if (n > n1) t += std::sqrt(static_cast<double>(n)) * diff_at(f, comp, axis, DiffKind::Left, p);
                r.rhs += t / std::sqrt(2.0);
                break;
            }
        }
    });
    return r;
}

}  // namespace dps
