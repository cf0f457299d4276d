#include "dps/gauss.hpp"

#include <cmath>

namespace dps {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Deterministic value in [-1, 1) keyed on (seed, tag, point).
double hashed(std::uint64_t seed, std::uint64_t tag, const Point& p) {
    std::uint64_t h = splitmix(seed ^ splitmix(tag));
    for (int c : p) h = splitmix(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(c) + 1000));
    return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
}

}  // namespace

RealField divergence_free_current(const LatticeDomain& d, std::uint64_t seed) {
    const int dim = d.dim();
    const int last = dim - 1;
    auto supported = [&](const Point& n) {
        for (int a = 0; a < last; ++a) {
            const int c = n[static_cast<std::size_t>(a)];
            if (c < d.lower(a) + 1 || c > d.upper(a)) return false;
        }
        return true;
    };
    auto psi = [&](int mu, int nu, const Point& n) {
        if (mu == nu || !supported(n)) return 0.0;
        const int lo = std::min(mu, nu), hi = std::max(mu, nu);
        const double v = hashed(seed, static_cast<std::uint64_t>(10 * lo + hi), n);
        return mu < nu ? v : -v;
    };
    return RealField::from_function(d, dim, [&](int mu, const Point& n) {
        double j = 0.0;
        for (int nu = 0; nu < dim; ++nu) j += psi(mu, nu, shifted(n, nu, 1)) - psi(mu, nu, n);
        if (mu == last) {
            Point q = n;
            q[static_cast<std::size_t>(last)] = 0;
            j += hashed(seed, 99, q);
        }
        return j;
    });
}

RealField poisson_density(const LatticeDomain& d, double lambda) {
    return RealField::from_function(
        d, 1,
        [&](int, const Point& p) {
            double v = 1.0;
            for (int a = 0; a < d.dim(); ++a) {
                const double n = p[static_cast<std::size_t>(a)];
                v *= std::exp(-lambda + n * std::log(lambda) - std::lgamma(n + 1.0));
            }
            return v;
        },
        false);
}

}  // namespace dps
