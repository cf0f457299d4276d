#include "dps/lattice.hpp"

#include <sstream>

namespace dps {

std::size_t LatticeDomain::hull_size() const {
    if (dim_ == 0) return 0;
    std::size_t n = 1;
    for (int a = 0; a < dim_; ++a) n *= static_cast<std::size_t>(extent(a));
    return n;
}

bool LatticeDomain::in_hull(const Point& p) const {
    for (int a = 0; a < dim_; ++a) {
        const int c = p[static_cast<std::size_t>(a)];
        if (c < lower(a) || c > upper(a)) return false;
    }
    return true;
}

bool LatticeDomain::is_interior(const Point& p) const { return is_inset(p, 1); }

bool LatticeDomain::is_inset(const Point& p, int inset) const {
    for (int a = 0; a < dim_; ++a) {
        const int c = p[static_cast<std::size_t>(a)];
        if (c < lower(a) + inset || c > upper(a) - inset) return false;
    }
    return true;
}

std::size_t LatticeDomain::linear_index(const Point& p) const {
    if (!in_hull(p)) throw RangeError("point " + to_string(p, dim_) + " outside the hull");
    std::size_t idx = 0, stride = 1;
    for (int a = 0; a < dim_; ++a) {
        idx += static_cast<std::size_t>(p[static_cast<std::size_t>(a)] - lower(a)) * stride;
        stride *= static_cast<std::size_t>(extent(a));
    }
    return idx;
}

LatticeDomain make_domain(const std::vector<int>& lower, const std::vector<int>& upper) {
    if (lower.size() != upper.size())
        throw DimensionError("lower has " + std::to_string(lower.size()) + " axes, upper has " +
                             std::to_string(upper.size()));
    if (lower.empty() || lower.size() > static_cast<std::size_t>(kMaxDim))
        throw DimensionError("dimension must be between 1 and 4, got " + std::to_string(lower.size()));
    LatticeDomain d;
    d.dim_ = static_cast<int>(lower.size());
    for (std::size_t a = 0; a < lower.size(); ++a) {
        if (lower[a] < 0) throw BoundsError("negative lower bound on axis " + std::to_string(a + 1));
        if (lower[a] >= upper[a])
            throw BoundsError("axis " + std::to_string(a + 1) + ": lower " + std::to_string(lower[a]) +
                              " must be below upper " + std::to_string(upper[a]));
        d.lower_[a] = lower[a];
        d.upper_[a] = upper[a];
    }
    return d;
}

LatticeDomain make_grid(const std::vector<int>& sizes) {
    std::vector<int> lo(sizes.size(), 0), hi(sizes.size());
    for (std::size_t a = 0; a < sizes.size(); ++a) hi[a] = sizes[a] - 1;
    return make_domain(lo, hi);
}

std::string to_string(const Point& p, int dim) {
    std::ostringstream os;
    os << '(';
    for (int a = 0; a < dim; ++a) os << (a ? "," : "") << p[static_cast<std::size_t>(a)];
    os << ')';
    return os.str();
}

std::vector<BoundaryFace> boundary_faces(const LatticeDomain& d) {
    std::vector<BoundaryFace> faces;
    faces.reserve(static_cast<std::size_t>(2 * d.dim()));
    for (int a = 0; a < d.dim(); ++a) {
        for (Side s : {Side::Minus, Side::Plus}) {
            BoundaryFace f;
            f.axis = a;
            f.side = s;
            const int fixed = s == Side::Minus ? d.lower(a) : d.upper(a);
            d.for_each_point([&](const Point& p) {
                if (p[static_cast<std::size_t>(a)] == fixed) f.points.push_back(p);
            });
            faces.push_back(std::move(f));
        }
    }
    return faces;
}

}  // namespace dps
