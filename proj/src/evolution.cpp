#include "dps/evolution.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <algorithm>
#include <random>

#include "json.hpp"

#include "dps/difference.hpp"

namespace dps {

std::string to_string(Integrator i) { return i == Integrator::Leapfrog ? "leapfrog" : "rk4"; }

namespace {

void require_spatial(const LatticeDomain& d) {
    if (d.dim() < 1 || d.dim() > 3) throw DimensionError("the evolution grid has 1 to 3 spatial axes");
}

Eigen::MatrixXd sharp_squared(const LatticeDomain& d, int a) {
    const Eigen::MatrixXd D = real_op(OpKind::DeltaSharp, d.extent(a), d.lower(a));
    return D * D;
}

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> as_scalar(const Eigen::VectorXcd& v) {
    if constexpr (std::is_same_v<Scalar, double>)
        return v.real();
    else
        return v;
}

}  // namespace

SpectralDecomposition::SpectralDecomposition(const LatticeDomain& d, double m) : d_(d), m_(m) {
    require_spatial(d);
    for (int a = 0; a < d.dim(); ++a) axes_.push_back(spectrum(axis_op(d, a, OpKind::P)));
    const auto n = static_cast<Eigen::Index>(d.hull_size());
    psq_ = Eigen::VectorXd::Zero(n);
    Eigen::Index k = 0;
    d.for_each_point([&](const Point& p) {
        double s = 0.0;
        for (int a = 0; a < d.dim(); ++a) {
            const double pa = axes_[static_cast<std::size_t>(a)].values(p[static_cast<std::size_t>(a)] - d.lower(a));
            s += pa * pa;
        }
        psq_(k++) = s;
    });
    omega_ = (psq_.array() + m * m).sqrt().matrix();
}

Eigen::VectorXcd SpectralDecomposition::to_modes(const Eigen::VectorXcd& hull) const {
    Eigen::VectorXcd v = hull;
    for (int a = 0; a < d_.dim(); ++a)
        v = apply_axis(d_, a, Eigen::MatrixXcd(axes_[static_cast<std::size_t>(a)].vectors.adjoint()), v);
    return v;
}

Eigen::VectorXcd SpectralDecomposition::from_modes(const Eigen::VectorXcd& modes) const {
    Eigen::VectorXcd v = modes;
    for (int a = 0; a < d_.dim(); ++a) v = apply_axis(d_, a, axes_[static_cast<std::size_t>(a)].vectors, v);
    return v;
}

Eigen::VectorXcd kg_operator(const LatticeDomain& d, double m, const Eigen::VectorXcd& v) {
    Eigen::VectorXcd out = -m * m * v;
    for (int a = 0; a < d.dim(); ++a) out += apply_axis(d, a, sharp_squared(d, a), v);
    return out;
}

Eigen::VectorXd kg_operator(const LatticeDomain& d, double m, const Eigen::VectorXd& v) {
    Eigen::VectorXd out = -m * m * v;
    for (int a = 0; a < d.dim(); ++a) out += apply_axis(d, a, sharp_squared(d, a), v);
    return out;
}

template <class Scalar>
LatticeField<Scalar> kg_rhs(const EvolutionState<Scalar>& s) {
    const auto& d = s.phi.domain();
    require_spatial(d);
    return LatticeField<Scalar>::unflatten(d, 1, kg_operator(d, s.m, s.phi.hull_values()));
}

template <class Scalar>
KleinGordonStepper<Scalar>::KleinGordonStepper(const LatticeDomain& d, double m) : d_(d), m_(m) {
    require_spatial(d);
    double psq = 0.0;
    for (int a = 0; a < d.dim(); ++a) {
        d2_.push_back(sharp_squared(d, a));
        // D# is real antisymmetric, so -D#^2 is symmetric with eigenvalues p^2
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-d2_.back(), Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw ConvergenceError("axis spectrum did not converge");
        psq += es.eigenvalues().maxCoeff();
    }
    omega_max_ = std::sqrt(psq + m * m);
}

template <class Scalar>
void KleinGordonStepper<Scalar>::check_stable(double dt, Integrator integ) const {
    if (!(dt > 0.0)) throw StabilityViolation("time step must be positive");
    const double bound = integ == Integrator::Leapfrog ? 2.0 : 2.0 * std::sqrt(2.0);
    if (dt * omega_max_ >= bound)
        throw StabilityViolation("dt * omega_max = " + std::to_string(dt * omega_max_) + " reaches the bound " +
                                 std::to_string(bound) + " for " + to_string(integ));
}

template <class Scalar>
typename KleinGordonStepper<Scalar>::Vec KleinGordonStepper<Scalar>::accel(const Vec& phi) const {
    Vec out = -m_ * m_ * phi;
    for (int a = 0; a < d_.dim(); ++a) out += apply_axis(d_, a, d2_[static_cast<std::size_t>(a)], phi);
    return out;
}

template <class Scalar>
EvolutionState<Scalar> KleinGordonStepper<Scalar>::leapfrog(const EvolutionState<Scalar>& s, double dt) const {
    check_stable(dt, Integrator::Leapfrog);
    Vec q = s.phi.hull_values(), p = s.pi.hull_values();
    p += 0.5 * dt * accel(q);
    q += dt * p;
    p += 0.5 * dt * accel(q);
    EvolutionState<Scalar> r{LatticeField<Scalar>::unflatten(d_, 1, q), LatticeField<Scalar>::unflatten(d_, 1, p),
                             s.t + dt, s.m};
    return r;
}

template <class Scalar>
EvolutionState<Scalar> KleinGordonStepper<Scalar>::rk4(const EvolutionState<Scalar>& s, double dt) const {
    check_stable(dt, Integrator::RK4);
    const Vec q = s.phi.hull_values(), p = s.pi.hull_values();
    const Vec k1q = p, k1p = accel(q);
    const Vec k2q = p + 0.5 * dt * k1p, k2p = accel(q + 0.5 * dt * k1q);
    const Vec k3q = p + 0.5 * dt * k2p, k3p = accel(q + 0.5 * dt * k2q);
    const Vec k4q = p + dt * k3p, k4p = accel(q + dt * k3q);
    const Vec qn = q + (dt / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    const Vec pn = p + (dt / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    return {LatticeField<Scalar>::unflatten(d_, 1, qn), LatticeField<Scalar>::unflatten(d_, 1, pn), s.t + dt, s.m};
}

template <class Scalar>
EvolutionState<Scalar> KleinGordonStepper<Scalar>::step(const EvolutionState<Scalar>& s, double dt,
                                                         Integrator integ) const {
    return integ == Integrator::Leapfrog ? leapfrog(s, dt) : rk4(s, dt);
}

template <class Scalar>
EvolutionState<Scalar> spectral_solve(const EvolutionState<Scalar>& s, double t, const SpectralDecomposition& sd) {
    const auto& d = s.phi.domain();
    if (!(sd.domain() == d)) throw DomainMismatch("spectral decomposition built for another grid");
    const double tau = t - s.t;
    const Eigen::VectorXcd c = sd.to_modes(s.phi.hull_values().template cast<Complex>());
    const Eigen::VectorXcd v = sd.to_modes(s.pi.hull_values().template cast<Complex>());
    Eigen::VectorXcd qc(c.size()), pc(c.size());
    for (Eigen::Index k = 0; k < c.size(); ++k) {
        const double w = sd.omega()(k);
        const double cs = std::cos(w * tau);
        const double sn_over_w = w > 0.0 ? std::sin(w * tau) / w : tau;
        qc(k) = c(k) * cs + v(k) * sn_over_w;
        pc(k) = -c(k) * w * w * sn_over_w + v(k) * cs;
    }
    EvolutionState<Scalar> r;
    r.phi = LatticeField<Scalar>::unflatten(d, 1, as_scalar<Scalar>(sd.from_modes(qc)));
    r.pi = LatticeField<Scalar>::unflatten(d, 1, as_scalar<Scalar>(sd.from_modes(pc)));
    r.t = t;
    r.m = s.m;
    return r;
}

template <class Scalar>
EvolutionState<Scalar> spectral_solve(const EvolutionState<Scalar>& s, double t) {
    return spectral_solve(s, t, SpectralDecomposition(s.phi.domain(), s.m));
}

ComplexField schroedinger_evolve(const ComplexField& psi, double m, double t, const SpectralDecomposition& sd) {
    if (!(m > 0.0)) throw RangeError("the Schroedinger mass must be positive");
    if (!(sd.domain() == psi.domain())) throw DomainMismatch("spectral decomposition built for another grid");
    Eigen::VectorXcd c = sd.to_modes(psi.hull_values());
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::exp(Complex(0.0, -sd.momentum_sq()(k) * t / (2.0 * m)));
    return ComplexField::unflatten(psi.domain(), 1, sd.from_modes(c));
}

ComplexField schroedinger_evolve(const ComplexField& psi, double m, double t) {
    return schroedinger_evolve(psi, m, t, SpectralDecomposition(psi.domain(), m));
}

ComplexField band_limited_complex(const SpectralDecomposition& sd, std::uint64_t seed, double fraction) {
    const auto& d = sd.domain();
    std::vector<double> limit;
    for (int a = 0; a < d.dim(); ++a) limit.push_back(fraction * sd.axis(a).values.cwiseAbs().maxCoeff() + 1e-12);
    std::mt19937_64 g(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(d.hull_size()));
    Eigen::Index k = 0;
    d.for_each_point([&](const Point& p) {
        bool keep = true;
        for (int a = 0; a < d.dim(); ++a) {
            const double pa = sd.axis(a).values(p[static_cast<std::size_t>(a)] - d.lower(a));
            keep &= std::abs(pa) <= limit[static_cast<std::size_t>(a)];
        }
        const double re = nd(g), im = nd(g);
        if (keep) c(k) = Complex(re, im);
        ++k;
    });
    Eigen::VectorXcd v = sd.from_modes(c);
    v /= v.norm();
    return ComplexField::unflatten(d, 1, v);
}

RealField band_limited_real(const SpectralDecomposition& sd, std::uint64_t seed, double fraction) {
    // the conjugate of a P eigenvector belongs to -p, so the real part keeps the same |p| band
    const ComplexField z = band_limited_complex(sd, seed, fraction);
    Eigen::VectorXd v = z.hull_values().real();
    v /= v.norm();
    return RealField::unflatten(sd.domain(), 1, v);
}

ComplexField product_mode(const SpectralDecomposition& sd, const std::vector<int>& index) {
    const auto& d = sd.domain();
    if (static_cast<int>(index.size()) != d.dim()) throw DimensionError("one mode index per axis");
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(d.hull_size()));
    Point p{};
    for (int a = 0; a < d.dim(); ++a) {
        if (index[static_cast<std::size_t>(a)] < 0 || index[static_cast<std::size_t>(a)] >= d.extent(a))
            throw RangeError("mode index out of range on axis " + std::to_string(a + 1));
        p[static_cast<std::size_t>(a)] = d.lower(a) + index[static_cast<std::size_t>(a)];
    }
    c(static_cast<Eigen::Index>(d.linear_index(p))) = 1.0;
    return ComplexField::unflatten(d, 1, sd.from_modes(c));
}

template <class Scalar>
double kg_energy(const EvolutionState<Scalar>& s) {
    const auto& d = s.phi.domain();
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> q = s.phi.hull_values(), p = s.pi.hull_values();
    double h = p.squaredNorm() + s.m * s.m * q.squaredNorm();
    for (int a = 0; a < d.dim(); ++a)
        h += apply_axis(d, a, real_op(OpKind::DeltaSharp, d.extent(a), d.lower(a)), q).squaredNorm();
    return 0.5 * h;
}

template <class Scalar>
void write_snapshot(const EvolutionState<Scalar>& s, const std::string& stem, double dt, Integrator integ) {
    const auto& d = s.phi.domain();
    std::ofstream csv(stem + ".csv");
    if (!csv) throw IoError("cannot open " + stem + ".csv");
    csv << std::setprecision(17);
    csv << "n1,n2,n3,re_phi,im_phi,re_pi,im_pi\n";
    d.for_each_point([&](const Point& p) {
        const Complex f = s.phi.at(p), v = s.pi.at(p);
        csv << p[0] << ',' << p[1] << ',' << p[2] << ',' << f.real() << ',' << f.imag() << ',' << v.real() << ','
            << v.imag() << '\n';
    });
    nlohmann::ordered_json h;
    std::vector<int> grid;
    for (int a = 0; a < d.dim(); ++a) grid.push_back(d.extent(a));
    h["grid"] = grid;
    h["m"] = s.m;
    h["t"] = s.t;
    h["dt"] = dt;
    h["integrator"] = to_string(integ);
    std::ofstream js(stem + ".json");
    if (!js) throw IoError("cannot open " + stem + ".json");
    js << h.dump(2) << '\n';
}

template LatticeField<double> kg_rhs(const EvolutionState<double>&);
template LatticeField<Complex> kg_rhs(const EvolutionState<Complex>&);
template class KleinGordonStepper<double>;
template class KleinGordonStepper<Complex>;
template EvolutionState<double> spectral_solve(const EvolutionState<double>&, double);
template EvolutionState<Complex> spectral_solve(const EvolutionState<Complex>&, double);
template EvolutionState<double> spectral_solve(const EvolutionState<double>&, double, const SpectralDecomposition&);
template EvolutionState<Complex> spectral_solve(const EvolutionState<Complex>&, double, const SpectralDecomposition&);
template double kg_energy(const EvolutionState<double>&);
template double kg_energy(const EvolutionState<Complex>&);
template void write_snapshot(const EvolutionState<double>&, const std::string&, double, Integrator);
template void write_snapshot(const EvolutionState<Complex>&, const std::string&, double, Integrator);

}  // namespace dps
