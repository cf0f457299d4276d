#pragma once

#include <random>

#include "dps/lattice.hpp"

namespace dps::test {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

template <class Scalar>
Scalar draw(std::mt19937_64& g) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    if constexpr (std::is_same_v<Scalar, double>)
        return u(g);
    else
        return Scalar(u(g), u(g));
}

/// Random values on hull and halo.
template <class Scalar>
LatticeField<Scalar> random_field(const LatticeDomain& d, std::mt19937_64& g, int comps = 1, bool halo = true) {
    return LatticeField<Scalar>::from_function(d, comps, [&](int, const Point&) { return draw<Scalar>(g); }, halo);
}

}  // namespace dps::test
