#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dps/difference.hpp"

namespace dps {

/// Slot layout of the jet (y, y_mu) per component. Complex Lagrangians carry a
/// second block for the conjugate slots (rho-bar, rho-bar_mu).
struct JetLayout {
    int components = 1;
    int axes = 1;  ///< derivative slots per component
    bool complex = false;

    int per_component() const { return 1 + axes; }
    int block() const { return components * per_component(); }
    int slots() const { return (complex ? 2 : 1) * block(); }
    int value(int c, bool conj = false) const { return (conj ? block() : 0) + c * per_component(); }
    int deriv(int c, int mu, bool conj = false) const { return value(c, conj) + 1 + mu; }
};

/// L(z) = c + b^T z + (1/2) z^T H z over the jet slots z, H symmetric. Second
/// degree by construction; derivatives are read off the coefficients.
class QuadraticLagrangian {
public:
    explicit QuadraticLagrangian(const JetLayout& layout);

    const JetLayout& layout() const { return layout_; }
    Complex constant() const { return c_; }
    const Eigen::VectorXcd& linear() const { return b_; }
    const Eigen::MatrixXcd& hessian() const { return h_; }

    void set_constant(Complex c) { c_ = c; }
    void set_linear(int slot, Complex v);
    /// Sets H(i, j) = H(j, i) = v.
    void set_hessian(int i, int j, Complex v);

    Complex value(const Eigen::VectorXcd& z) const;
    /// dL/dz = b + H z.
    Eigen::VectorXcd gradient(const Eigen::VectorXcd& z) const;
    /// Real-valued on conjugate slot pairs: conj(L(z)) = L(swap(z)).
    bool is_real_valued(double tol = 1e-14) const;

    /// -(1/2)[sum_mu eta_mu y_mu^2 + m^2 y^2]; the last axis is time-like when
    /// `time_last` is set, otherwise the metric follows the axis index.
    static QuadraticLagrangian klein_gordon(int axes, double m, bool time_last = false);
    /// -[sum_mu eta_mu conj(rho_mu) rho_mu + m^2 conj(rho) rho].
    static QuadraticLagrangian klein_gordon_complex(int axes, double m, bool time_last = false);
    /// Uniform coefficients in [-1, 1]; complex layouts give a real-valued L.
    static QuadraticLagrangian random(const JetLayout& layout, std::uint64_t seed);

    std::string serialize() const;
    static QuadraticLagrangian parse(const std::string& json);

private:
    JetLayout layout_;
    Complex c_{};
    Eigen::VectorXcd b_;
    Eigen::MatrixXcd h_;
};

/// Sum over the 4-axis lattice (A) or spatial sums with a time integral (B).
enum class ActionRep { SumA, SumIntegralB };

struct ActionValue {
    Complex value{};
    LatticeDomain domain;
    ActionRep rep = ActionRep::SumA;
    double dt = 0.0;  ///< time step of the trapezoid rule (B)
};

/// Jet matrix (slots x hull points) of f at every point of `d`.
template <class Scalar>
Eigen::MatrixXcd jet_matrix(const JetLayout& layout, const LatticeField<Scalar>& f, const LatticeDomain& d);
/// Same on f's hull with d/dt f in the last derivative slot.
template <class Scalar>
Eigen::MatrixXcd jet_matrix(const JetLayout& layout, const LatticeField<Scalar>& f, const LatticeField<Scalar>& dt_f);

/// Action sum over `d` (default: the field's hull, which always has its halo
/// stored). HaloMissing when `d` plus one layer leaves the field's storage.
template <class Scalar>
ActionValue action(const QuadraticLagrangian& L, const LatticeField<Scalar>& f);
template <class Scalar>
ActionValue action(const QuadraticLagrangian& L, const LatticeField<Scalar>& f, const LatticeDomain& d);

/// Snapshot series for the sum-integral: uniform times, f and d/dt f per time.
template <class Scalar>
struct TimeSeries {
    std::vector<double> t;
    std::vector<LatticeField<Scalar>> f, dt_f;
};

/// Trapezoid rule over the snapshots; the last derivative slot is d/dt.
/// QuadratureWindowError for fewer than two snapshots, mismatched lengths or a
/// non-uniform grid.
template <class Scalar>
ActionValue action(const QuadraticLagrangian& L, const TimeSeries<Scalar>& s);

/// Which family of EL equations: derivatives by rho (plain) or by conj(rho).
enum class ELForm { Plain, Conjugate };

/// dL/dy - D#_mu dL/dy_mu on interior points (boundary points are zero), per component.
template <class Scalar>
LatticeField<Complex> euler_lagrange_residual(const QuadraticLagrangian& L, const LatticeField<Scalar>& f,
                                              ELForm form = ELForm::Plain);

/// Difference-differential form: also subtracts d/dt dL/dy_4, using d/dt f and
/// d^2/dt^2 f at the same instant.
template <class Scalar>
LatticeField<Complex> euler_lagrange_residual(const QuadraticLagrangian& L, const LatticeField<Scalar>& f,
                                              const LatticeField<Scalar>& dt_f, const LatticeField<Scalar>& dt2_f,
                                              ELForm form = ELForm::Plain);

struct GradientCheck {
    double deviation = 0.0;  ///< max |numeric - EL| / max |EL| over the probes
    double max_abs = 0.0;
    int probes = 0;
};

/// Central-difference derivative of the action in f(m) against the EL residual at
/// every probe m. Complex fields use the Wirtinger pair: the plain form matches
/// (1/2)(d/dRe - i d/dIm), the conjugate form (1/2)(d/dRe + i d/dIm).
/// ProbeOnBoundary for probes outside the interior.
template <class Scalar>
GradientCheck action_gradient_check(const QuadraticLagrangian& L, const LatticeField<Scalar>& f,
                                    const std::vector<Point>& probes, double h, ELForm form = ELForm::Plain);

enum class LedgerVariant { Corrected, AsPrinted };

struct BoundaryAudit {
    double direct = 0.0;   ///< d/de A(f + e h) at e = 0, by central difference (exact for quadratic L)
    double ledger = 0.0;   ///< boundary ledger evaluated with the chosen variant
};

/// 2D real scalar field: first-order action change under a variation living on
/// the boundary and halo layers versus the boundary-term ledger.
/// InteriorVariation when h is nonzero at an interior point.
BoundaryAudit boundary_term_audit(const QuadraticLagrangian& L, const RealField& f, const RealField& h,
                                  LedgerVariant variant = LedgerVariant::Corrected);

/// Points a single-point indicator can sit on for the audit: hull boundary
/// plus the four halo strips (halo corners never enter the sum).
std::vector<Point> boundary_indicator_points(const LatticeDomain& d);

struct ProbeValue {
    Point m{};
    double value = 0.0;
};

/// Pairs g with the Kronecker indicator of each interior point over the
/// interior double sum; returns one entry per interior point.
std::vector<ProbeValue> dubois_reymond_probe(const RealField& g);

}  // namespace dps
