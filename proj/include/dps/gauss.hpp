#pragma once

#include <cstdint>
#include <vector>

#include "dps/difference.hpp"

namespace dps {

template <class Scalar>
struct GaussSums {
    Scalar volume{};
    Scalar boundary{};
};

/// Both sides of the discrete Gauss theorem for a current with one component
/// per axis. With Right differences the closed-hull sum telescopes to the
/// plus faces read one layer outside (n^mu = upper + 1) minus the minus faces;
/// with Left differences the plus faces are read in place and the minus faces
/// one layer below (n^mu = lower - 1).
template <class Scalar>
GaussSums<Scalar> gauss_sum(const LatticeField<Scalar>& j, const LatticeDomain& d, DiffKind kind) {
    if (!(j.domain() == d)) throw DomainMismatch("current and domain differ");
    if (j.components() != d.dim())
        throw DomainMismatch("current has " + std::to_string(j.components()) + " components on a " +
                             std::to_string(d.dim()) + "D domain");
    if (kind == DiffKind::WeightedMean)
        throw AxisError("the Gauss sum is defined for right and left differences only");
    GaussSums<Scalar> s;
    d.for_each_point([&](const Point& p) {
        for (int mu = 0; mu < d.dim(); ++mu) s.volume += diff_at(j, mu, mu, kind, p);
    });
    const int up_shift = kind == DiffKind::Right ? 1 : 0;
    const int dn_shift = kind == DiffKind::Right ? 0 : -1;
    for (const auto& face : boundary_faces(d)) {
        const int shift = face.side == Side::Plus ? up_shift : dn_shift;
        for (const auto& p : face.points) s.boundary += Scalar(face.normal()) * j.at(face.axis, shifted(p, face.axis, shift));
    }
    return s;
}

/// Same sums by explicit nested loops over the per-axis telescoping, kept as
/// an independent cross-check.
template <class Scalar>
GaussSums<Scalar> gauss_sum_bruteforce(const LatticeField<Scalar>& j, const LatticeDomain& d, DiffKind kind) {
    GaussSums<Scalar> s;
    for (int mu = 0; mu < d.dim(); ++mu) {
        d.for_each_point([&](const Point& p) {
            const Point up = shifted(p, mu, 1), dn = shifted(p, mu, -1);
            s.volume += kind == DiffKind::Right ? j.at(mu, up) - j.at(mu, p) : j.at(mu, p) - j.at(mu, dn);
            const int n = p[static_cast<std::size_t>(mu)];
            if (kind == DiffKind::Right) {
                if (n == d.upper(mu)) s.boundary += j.at(mu, up);
                if (n == d.lower(mu)) s.boundary -= j.at(mu, p);
            } else {
                if (n == d.upper(mu)) s.boundary += j.at(mu, p);
                if (n == d.lower(mu)) s.boundary -= j.at(mu, dn);
            }
        });
    }
    return s;
}

struct SliceOptions {
    double divergence_tol = 1e-12;
    double flux_tol = 1e-12;
};

/// Sums of the last-axis component over each slice n^last = const, for a
/// current with vanishing right divergence on the hull and no flux through
/// the faces of the other axes. Raises NotConserved or BoundaryFlux when a
/// precondition fails.
template <class Scalar>
std::vector<Scalar> conserved_slice_sums(const LatticeField<Scalar>& j, const LatticeDomain& d,
                                         const SliceOptions& opt = {}) {
    if (!(j.domain() == d) || j.components() != d.dim())
        throw DomainMismatch("current must carry one component per axis of the domain");
    const int last = d.dim() - 1;
    double div_max = 0.0;
    d.for_each_point([&](const Point& p) {
        Scalar div{};
        for (int mu = 0; mu < d.dim(); ++mu) div += diff_at(j, mu, mu, DiffKind::Right, p);
        div_max = std::max(div_max, std::abs(div));
    });
    if (div_max > opt.divergence_tol)
        throw NotConserved("right divergence reaches " + std::to_string(div_max) + " on the hull");
    double flux_max = 0.0;
    for (const auto& face : boundary_faces(d)) {
        if (face.axis == last) continue;
        const int shift = face.side == Side::Plus ? 1 : 0;
        for (const auto& p : face.points) flux_max = std::max(flux_max, std::abs(j.at(face.axis, shifted(p, face.axis, shift))));
    }
    if (flux_max > opt.flux_tol)
        throw BoundaryFlux("normal current through a transverse face reaches " + std::to_string(flux_max));
    std::vector<Scalar> sums(static_cast<std::size_t>(d.extent(last)));
    d.for_each_point([&](const Point& p) {
        sums[static_cast<std::size_t>(p[static_cast<std::size_t>(last)] - d.lower(last))] += j.at(last, p);
    });
    return sums;
}

template <class Scalar>
struct ChargeSum {
    Scalar sum{};
    double shell_max = 0.0;  ///< max |j4| over points with max_a n^a = cutoff
};

/// Sum of j4 over the box [0, cutoff]^dim with the cutoff-shell maximum as a
/// truncation certificate. A positive `tail_tol` turns the certificate into a
/// hard check (TailTooLarge).
template <class Scalar>
ChargeSum<Scalar> total_charge_sum(const LatticeField<Scalar>& j4, int cutoff, double tail_tol = -1.0, int comp = 0) {
    const auto& d = j4.domain();
    for (int a = 0; a < d.dim(); ++a)
        if (d.lower(a) != 0 || d.upper(a) < cutoff)
            throw RangeError("charge sums start at 0 and need the cutoff " + std::to_string(cutoff) + " inside the hull");
    ChargeSum<Scalar> c;
    d.for_each_point([&](const Point& p) {
        int top = 0;
        for (int a = 0; a < d.dim(); ++a) {
            if (p[static_cast<std::size_t>(a)] > cutoff) return;
            top = std::max(top, p[static_cast<std::size_t>(a)]);
        }
        const Scalar v = j4.at(comp, p);
        c.sum += v;
        if (top == cutoff) c.shell_max = std::max(c.shell_max, std::abs(v));
    });
    if (tail_tol >= 0.0 && c.shell_max > tail_tol)
        throw TailTooLarge("cutoff shell reaches " + std::to_string(c.shell_max) + ", tolerance " + std::to_string(tail_tol));
    return c;
}

/// Exploration only: the weighted-mean divergence sum split into the parts
/// its summation rule produces. Nothing is asserted.
template <class Scalar>
struct SharpGaussProbe {
    Scalar volume{};    ///< sum of D#_mu j^mu over the hull
    Scalar faces{};     ///< (1/sqrt2)[sqrt(N2+1) j(N2+1) - sqrt(N1) j(N1-1)] face terms
    Scalar bulk{};      ///< (1/sqrt2) sum of sqrt(n) D'_mu j^mu over n^mu > N1
};

template <class Scalar>
SharpGaussProbe<Scalar> sharp_gauss_probe(const LatticeField<Scalar>& j, const LatticeDomain& d) {
    if (!(j.domain() == d) || j.components() != d.dim())
        throw DomainMismatch("current must carry one component per axis of the domain");
    SharpGaussProbe<Scalar> r;
    const double r2 = std::sqrt(2.0);
    d.for_each_point([&](const Point& p) {
        for (int mu = 0; mu < d.dim(); ++mu) {
            r.volume += diff_at(j, mu, mu, DiffKind::WeightedMean, p);
            const int n = p[static_cast<std::size_t>(mu)];
            if (n == d.upper(mu)) r.faces += std::sqrt(n + 1.0) * j.at(mu, shifted(p, mu, 1)) / r2;
            if (n == d.lower(mu) && n > 0) r.faces -= std::sqrt(double(n)) * j.at(mu, shifted(p, mu, -1)) / r2;
            if (n > d.lower(mu)) r.bulk += std::sqrt(double(n)) * diff_at(j, mu, mu, DiffKind::Left, p) / r2;
        }
    });
    return r;
}

/// Balance of the difference-differential conservation law on a spatial
/// domain: d/dt of the summed time component against minus the total
/// spatial outflow (right-difference faces).
struct DiffDiffBalance {
    double dt_total = 0.0;
    double minus_flux = 0.0;
};

template <class Scalar>
DiffDiffBalance diffdiff_balance(const LatticeField<Scalar>& j_spatial, const LatticeField<Scalar>& dt_j4) {
    const auto& d = j_spatial.domain();
    if (!(dt_j4.domain() == d) || j_spatial.components() != d.dim())
        throw DomainMismatch("spatial current needs one component per axis and the time part the same domain");
    Scalar total{}, flux{};
    d.for_each_point([&](const Point& p) { total += dt_j4.at(p); });
    flux = gauss_sum(j_spatial, d, DiffKind::Right).boundary;
    DiffDiffBalance b;
    if constexpr (std::is_same_v<Scalar, double>) {
        b.dt_total = total;
        b.minus_flux = -flux;
    } else {
        b.dt_total = total.real();
        b.minus_flux = -flux.real();
    }
    return b;
}

/// Divergence-free current on `d` (one component per axis), built from a
/// random antisymmetric potential psi^{mu nu} as j^mu = sum_nu D_nu psi^{mu nu}
/// plus a time component that depends only on the other coordinates. The
/// potential vanishes unless every non-last coordinate lies in
/// [lower + 1, upper], so no current leaves through the transverse faces.
RealField divergence_free_current(const LatticeDomain& d, std::uint64_t seed);

/// Poisson weights exp(-lambda) lambda^n / n! multiplied over the axes.
RealField poisson_density(const LatticeDomain& d, double lambda);

}  // namespace dps
