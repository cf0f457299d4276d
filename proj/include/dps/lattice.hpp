#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dps/errors.hpp"

namespace dps {

inline constexpr int kMaxDim = 4;

/// Lattice point; only the first `dim` entries are meaningful, the rest stay 0.
using Point = std::array<int, kMaxDim>;

using Complex = std::complex<double>;

/// Flat metric diag(+1, +1, +1, -1). The time-like axis is the fourth one.
struct MetricSignature {
    static constexpr std::array<int, kMaxDim> diag{1, 1, 1, -1};

    static constexpr int eta(int mu, int nu) { return mu == nu ? diag[static_cast<std::size_t>(mu)] : 0; }
};

enum class Side { Minus, Plus };

/// Closed hull [lower, upper] of quantum numbers. Points with
/// lower < n < upper on every axis form the interior, the rest of the hull is
/// the boundary.
class LatticeDomain {
public:
    LatticeDomain() = default;

    int dim() const { return dim_; }
    int lower(int axis) const { return lower_[static_cast<std::size_t>(axis)]; }
    int upper(int axis) const { return upper_[static_cast<std::size_t>(axis)]; }
    int extent(int axis) const { return upper(axis) - lower(axis) + 1; }
    const Point& lower() const { return lower_; }
    const Point& upper() const { return upper_; }

    std::size_t hull_size() const;

    bool in_hull(const Point& p) const;
    bool is_interior(const Point& p) const;
    bool is_boundary(const Point& p) const { return in_hull(p) && !is_interior(p); }
    /// Hull point at distance >= inset from every face.
    bool is_inset(const Point& p, int inset) const;

    /// Visits every hull point in lexicographic order with n^1 fastest.
    template <class Fn>
    void for_each_point(Fn&& fn) const {
        Point p = lower_;
        const std::size_t n = hull_size();
        for (std::size_t k = 0; k < n; ++k) {
            fn(static_cast<const Point&>(p));
            for (int a = 0; a < dim_; ++a) {
                auto& c = p[static_cast<std::size_t>(a)];
                if (++c <= upper(a)) break;
                c = lower(a);
            }
        }
    }

    /// Position of a hull point in the lexicographic order.
    std::size_t linear_index(const Point& p) const;

    bool operator==(const LatticeDomain& other) const = default;

private:
    friend LatticeDomain make_domain(const std::vector<int>&, const std::vector<int>&);

    int dim_ = 0;
    Point lower_{};
    Point upper_{};
};

LatticeDomain make_domain(const std::vector<int>& lower, const std::vector<int>& upper);

/// Uniform-extent convenience: axes of `size` points starting at 0.
LatticeDomain make_grid(const std::vector<int>& sizes);

std::string to_string(const Point& p, int dim);

struct BoundaryFace {
    int axis = 0;
    Side side = Side::Minus;
    std::vector<Point> points;

    int normal() const { return side == Side::Plus ? 1 : -1; }
};

/// The 2*dim faces, minus before plus for each axis. Transverse axes span the
/// closed hull.
std::vector<BoundaryFace> boundary_faces(const LatticeDomain& d);

inline Point unit(int axis) {
    Point e{};
    e[static_cast<std::size_t>(axis)] = 1;
    return e;
}

inline Point shifted(Point p, int axis, int by) {
    p[static_cast<std::size_t>(axis)] += by;
    return p;
}

/// Multi-component field on a domain. Storage covers the hull plus one halo
/// layer on every side; every lookup outside the storage is exactly zero.
template <class Scalar>
class LatticeField {
public:
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    LatticeField() = default;
    explicit LatticeField(const LatticeDomain& domain, int components = 1)
        : domain_(domain), components_(components) {
        if (components < 1) throw ComponentError("component count must be positive");
        std::size_t n = 1;
        for (int a = 0; a < domain.dim(); ++a) {
            strides_[static_cast<std::size_t>(a)] = n;
            n *= static_cast<std::size_t>(domain.extent(a) + 2);
        }
        points_ = n;
        values_ = Vector::Zero(static_cast<Eigen::Index>(n * static_cast<std::size_t>(components)));
    }

    const LatticeDomain& domain() const { return domain_; }
    int components() const { return components_; }

    bool stored(const Point& p) const {
        for (int a = 0; a < domain_.dim(); ++a) {
            const int c = p[static_cast<std::size_t>(a)];
            if (c < domain_.lower(a) - 1 || c > domain_.upper(a) + 1) return false;
        }
        return true;
    }

    /// Zero outside the stored range; throws only for a bad component.
    Scalar at(int comp, const Point& p) const {
        check_component(comp);
        if (!stored(p)) return Scalar(0);
        return values_[offset(comp, p)];
    }
    Scalar at(const Point& p) const { return at(0, p); }

    /// Writable reference to a stored point. Points with a negative
    /// coordinate are outside the index space and rejected.
    Scalar& ref(int comp, const Point& p) {
        check_component(comp);
        if (!stored(p)) throw RangeError("point " + to_string(p, domain_.dim()) + " is not stored");
        for (int a = 0; a < domain_.dim(); ++a)
            if (p[static_cast<std::size_t>(a)] < 0)
                throw RangeError("negative quantum number in " + to_string(p, domain_.dim()));
        return values_[offset(comp, p)];
    }
    Scalar& ref(const Point& p) { return ref(0, p); }

    /// Raw storage including the halo (component-major, n^1 fastest).
    const Vector& storage() const { return values_; }
    Vector& storage() { return values_; }

    /// Visits every stored point with non-negative coordinates (hull + halo).
    template <class Fn>
    void for_each_stored(Fn&& fn) const {
        Point lo{}, hi{};
        for (int a = 0; a < domain_.dim(); ++a) {
            lo[static_cast<std::size_t>(a)] = std::max(domain_.lower(a) - 1, 0);
            hi[static_cast<std::size_t>(a)] = domain_.upper(a) + 1;
        }
        Point p = lo;
        while (true) {
            fn(static_cast<const Point&>(p));
            int a = 0;
            for (; a < domain_.dim(); ++a) {
                auto& c = p[static_cast<std::size_t>(a)];
                if (++c <= hi[static_cast<std::size_t>(a)]) break;
                c = lo[static_cast<std::size_t>(a)];
            }
            if (a == domain_.dim()) break;
        }
    }

    /// Hull values of one component, lexicographic order.
    Vector hull_values(int comp = 0) const {
        Vector v(static_cast<Eigen::Index>(domain_.hull_size()));
        Eigen::Index k = 0;
        domain_.for_each_point([&](const Point& p) { v[k++] = at(comp, p); });
        return v;
    }

    void set_hull_values(const Vector& v, int comp = 0) {
        if (v.size() != static_cast<Eigen::Index>(domain_.hull_size()))
            throw DomainMismatch("hull vector length differs from the domain size");
        Eigen::Index k = 0;
        domain_.for_each_point([&](const Point& p) { values_[offset(comp, p)] = v[k++]; });
    }

    /// Hull values of all components, component-major.
    Vector flatten() const {
        const auto m = static_cast<Eigen::Index>(domain_.hull_size());
        Vector v(m * components_);
        for (int c = 0; c < components_; ++c) v.segment(c * m, m) = hull_values(c);
        return v;
    }

    static LatticeField unflatten(const LatticeDomain& d, int components, const Vector& v) {
        LatticeField f(d, components);
        const auto m = static_cast<Eigen::Index>(d.hull_size());
        if (v.size() != m * components) throw DomainMismatch("flattened length mismatch");
        for (int c = 0; c < components; ++c) f.set_hull_values(v.segment(c * m, m), c);
        return f;
    }

    /// Zeroes the halo layer, keeping hull values.
    void clear_halo() {
        for_each_stored([&](const Point& p) {
            if (!domain_.in_hull(p))
                for (int c = 0; c < components_; ++c) values_[offset(c, p)] = Scalar(0);
        });
    }

    /// Fills from `fn(comp, point)` on the hull, and on the halo when
    /// `with_halo` is set.
    template <class Fn>
    static LatticeField from_function(const LatticeDomain& d, int components, Fn&& fn, bool with_halo = true) {
        LatticeField f(d, components);
        f.for_each_stored([&](const Point& p) {
            if (!with_halo && !d.in_hull(p)) return;
            for (int c = 0; c < components; ++c) f.values_[f.offset(c, p)] = fn(c, p);
        });
        return f;
    }

    bool same_shape(const LatticeField& o) const {
        return domain_ == o.domain_ && components_ == o.components_;
    }

    LatticeField& operator+=(const LatticeField& o) {
        require_same(o);
        values_ += o.values_;
        return *this;
    }
    LatticeField& operator-=(const LatticeField& o) {
        require_same(o);
        values_ -= o.values_;
        return *this;
    }
    LatticeField& operator*=(Scalar s) {
        values_ *= s;
        return *this;
    }
    friend LatticeField operator+(LatticeField a, const LatticeField& b) { return a += b; }
    friend LatticeField operator-(LatticeField a, const LatticeField& b) { return a -= b; }
    friend LatticeField operator*(Scalar s, LatticeField a) { return a *= s; }
    friend LatticeField operator*(LatticeField a, Scalar s) { return a *= s; }

    /// Pointwise product of single-component fields over the whole storage.
    friend LatticeField operator*(const LatticeField& a, const LatticeField& b) {
        a.require_same(b);
        LatticeField r = a;
        r.values_ = a.values_.cwiseProduct(b.values_);
        return r;
    }

    void require_same(const LatticeField& o) const {
        if (!same_shape(o)) throw DomainMismatch("fields live on different domains or component counts");
    }

private:
    void check_component(int comp) const {
        if (comp < 0 || comp >= components_)
            throw ComponentError("component " + std::to_string(comp) + " out of range [0, " +
                                 std::to_string(components_) + ")");
    }

    Eigen::Index offset(int comp, const Point& p) const {
        std::size_t off = static_cast<std::size_t>(comp) * points_;
        for (int a = 0; a < domain_.dim(); ++a)
            off += static_cast<std::size_t>(p[static_cast<std::size_t>(a)] - domain_.lower(a) + 1) *
                   strides_[static_cast<std::size_t>(a)];
        return static_cast<Eigen::Index>(off);
    }

    LatticeDomain domain_;
    int components_ = 1;
    std::array<std::size_t, kMaxDim> strides_{};
    std::size_t points_ = 0;
    Vector values_;
};

using RealField = LatticeField<double>;
using ComplexField = LatticeField<Complex>;

/// Lookup that never traps on the point; bad components raise ComponentError.
template <class Scalar>
Scalar field_at(const LatticeField<Scalar>& f, int comp, const Point& p) {
    return f.at(comp, p);
}

template <class Scalar>
LatticeField<Scalar> conj(const LatticeField<Scalar>& f) {
    LatticeField<Scalar> r = f;
    if constexpr (!std::is_same_v<Scalar, double>) r.storage() = f.storage().conjugate();
    return r;
}

inline RealField real_part(const ComplexField& f) {
    RealField r(f.domain(), f.components());
    r.storage() = f.storage().real();
    return r;
}

inline ComplexField to_complex(const RealField& f) {
    ComplexField r(f.domain(), f.components());
    r.storage() = f.storage().cast<Complex>();
    return r;
}

/// Squared l2 norm over the hull.
template <class Scalar>
double hull_norm2(const LatticeField<Scalar>& f) {
    double s = 0.0;
    for (int c = 0; c < f.components(); ++c) s += f.hull_values(c).squaredNorm();
    return s;
}

}  // namespace dps
