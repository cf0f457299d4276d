#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dps/lattice.hpp"
#include "dps/phase_ops.hpp"

namespace dps {

/// Fields of the difference-differential Klein-Gordon system on a spatial
/// grid (up to three axes). Halo values are ignored: the spatial operator is
/// the truncated matrix.
template <class Scalar>
struct EvolutionState {
    LatticeField<Scalar> phi;
    LatticeField<Scalar> pi;  ///< d/dt phi
    double t = 0.0;
    double m = 0.0;
};

using RealState = EvolutionState<double>;
using ComplexState = EvolutionState<Complex>;

/// Applies a one-axis matrix along `axis` of a flattened hull vector.
template <class Mat, class Vec>
Vec apply_axis(const LatticeDomain& d, int axis, const Mat& a, const Vec& v) {
    using S = typename Vec::Scalar;
    Eigen::Index inner = 1, outer = 1;
    for (int k = 0; k < axis; ++k) inner *= d.extent(k);
    for (int k = axis + 1; k < d.dim(); ++k) outer *= d.extent(k);
    const Eigen::Index n = d.extent(axis);
    Vec out(v.size());
    using Block = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
    const Block at = a.transpose().template cast<S>();
    for (Eigen::Index o = 0; o < outer; ++o) {
        Eigen::Map<const Block> in(v.data() + o * inner * n, inner, n);
        Eigen::Map<Block> res(out.data() + o * inner * n, inner, n);
        res.noalias() = in * at;
    }
    return out;
}

/// Per-axis eigendecomposition of P = -i D# and the resulting mode
/// frequencies omega = sqrt(sum_b p_b^2 + m^2).
class SpectralDecomposition {
public:
    SpectralDecomposition(const LatticeDomain& d, double m);

    const LatticeDomain& domain() const { return d_; }
    double mass() const { return m_; }
    const Spectrum& axis(int a) const { return axes_[static_cast<std::size_t>(a)]; }
    /// sum_b p_b^2 per mode, mode index laid out like the hull (first axis fastest).
    const Eigen::VectorXd& momentum_sq() const { return psq_; }
    const Eigen::VectorXd& omega() const { return omega_; }
    double omega_max() const { return omega_.maxCoeff(); }

    Eigen::VectorXcd to_modes(const Eigen::VectorXcd& hull) const;
    Eigen::VectorXcd from_modes(const Eigen::VectorXcd& modes) const;

private:
    LatticeDomain d_;
    double m_;
    std::vector<Spectrum> axes_;
    Eigen::VectorXd psq_, omega_;
};

/// sum_b D#_b D#_b phi - m^2 phi.
template <class Scalar>
LatticeField<Scalar> kg_rhs(const EvolutionState<Scalar>& s);

/// The same operator on a flattened hull vector.
Eigen::VectorXcd kg_operator(const LatticeDomain& d, double m, const Eigen::VectorXcd& v);
Eigen::VectorXd kg_operator(const LatticeDomain& d, double m, const Eigen::VectorXd& v);

enum class Integrator { Leapfrog, RK4 };

std::string to_string(Integrator i);

/// Stateful stepper; owns its operators and checks the stability bound
/// dt * omega_max < 2 (leapfrog) or 2 sqrt 2 (RK4) against the measured spectrum.
template <class Scalar>
class KleinGordonStepper {
public:
    KleinGordonStepper(const LatticeDomain& d, double m);

    double omega_max() const { return omega_max_; }
    void check_stable(double dt, Integrator integ) const;

    EvolutionState<Scalar> leapfrog(const EvolutionState<Scalar>& s, double dt) const;
    EvolutionState<Scalar> rk4(const EvolutionState<Scalar>& s, double dt) const;
    EvolutionState<Scalar> step(const EvolutionState<Scalar>& s, double dt, Integrator integ) const;

private:
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    Vec accel(const Vec& phi) const;

    LatticeDomain d_;
    double m_;
    std::vector<Eigen::MatrixXd> d2_;
    double omega_max_ = 0.0;
};

template <class Scalar>
EvolutionState<Scalar> step_leapfrog(const EvolutionState<Scalar>& s, double dt) {
    return KleinGordonStepper<Scalar>(s.phi.domain(), s.m).leapfrog(s, dt);
}

template <class Scalar>
EvolutionState<Scalar> step_rk4(const EvolutionState<Scalar>& s, double dt) {
    return KleinGordonStepper<Scalar>(s.phi.domain(), s.m).rk4(s, dt);
}

/// Exact state at time t from the data at s.t:
/// phi(t) = U [c cos(w dt) + d sin(w dt) / w] with (c, d) the mode coefficients.
template <class Scalar>
EvolutionState<Scalar> spectral_solve(const EvolutionState<Scalar>& s, double t);

template <class Scalar>
EvolutionState<Scalar> spectral_solve(const EvolutionState<Scalar>& s, double t, const SpectralDecomposition& sd);

/// Exact free Schroedinger evolution psi(t) = U exp(-i p^2 (t - t0) / 2m) U^H psi(t0).
ComplexField schroedinger_evolve(const ComplexField& psi, double m, double t);
ComplexField schroedinger_evolve(const ComplexField& psi, double m, double t, const SpectralDecomposition& sd);

/// Random data whose mode content sits on |p_b| <= fraction * max |p_b| on
/// every axis, normalized to unit L2 norm.
ComplexField band_limited_complex(const SpectralDecomposition& sd, std::uint64_t seed, double fraction = 1.0 / 3.0);
RealField band_limited_real(const SpectralDecomposition& sd, std::uint64_t seed, double fraction = 1.0 / 3.0);

/// Single product eigenmode of the P_b with the given per-axis mode indices
/// (ascending eigenvalue order).
ComplexField product_mode(const SpectralDecomposition& sd, const std::vector<int>& index);

/// H = (1/2) sum [ |pi|^2 + sum_b |D#_b phi|^2 + m^2 |phi|^2 ] over the hull.
template <class Scalar>
double kg_energy(const EvolutionState<Scalar>& s);

/// CSV rows (n1, n2, n3, Re phi, Im phi, Re pi, Im pi) and a JSON header
/// written next to it (`stem.csv`, `stem.json`).
template <class Scalar>
void write_snapshot(const EvolutionState<Scalar>& s, const std::string& stem, double dt, Integrator integ);

}  // namespace dps
