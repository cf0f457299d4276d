#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dps/evolution.hpp"
#include "dps/phase_ops.hpp"

namespace dps {

/// delta_L phi = G(t) phi + C d/dt phi for the generator of `params`.
/// Raises MissingTimeDerivative when C is nonzero and no d/dt phi is given.
ComplexField lie_variation(const ComplexField& phi, const PoincareParams& params, Rep rep,
                           const SpinBlock& spin = SpinBlock::scalar());
ComplexField lie_variation(const ComplexField& phi, const ComplexField& dt_phi, double t, const PoincareParams& params,
                           Rep rep, const SpinBlock& spin = SpinBlock::scalar(),
                           BoostForm boost = BoostForm::AsPrinted);

enum class Equation {
    KG_Difference,  ///< sum_mu eta_mu D#_mu D#_mu phi - m^2 phi on four lattice axes
    KG_DiffDiff,    ///< sum_b D#_b D#_b phi - d_t^2 phi - m^2 phi
    Schroedinger    ///< (1/2m) sum_b D#_b D#_b psi + i d_t psi
};

std::string to_string(Equation e);

/// Field and its first three time derivatives at one instant. Unused
/// derivatives stay empty (static equations need only `f`).
struct FieldJet {
    double t = 0.0;
    ComplexField f, f1, f2, f3;
};

/// Exact solution of one of the equations, evaluated on demand.
struct OracleSolution {
    Equation equation = Equation::KG_DiffDiff;
    LatticeDomain domain;
    double m = 0.0;
    std::function<FieldJet(double)> jet;
};

OracleSolution kg_diffdiff_oracle(const SpectralDecomposition& sd, const ComplexState& initial);
OracleSolution schroedinger_oracle(const SpectralDecomposition& sd, const ComplexField& psi0);
/// Product of P eigenvectors on four lattice axes; the mass is fixed by
/// m^2 = p_4^2 - sum_b p_b^2 (RangeError when that is not positive).
OracleSolution kg_difference_oracle(const LatticeDomain& d4, const std::vector<int>& mode);

/// The equation's operator applied to a jet.
ComplexField equation_operator(Equation eq, const LatticeDomain& d, double m, const FieldJet& j);

/// Point lies within `inset` layers of a truncation edge: any upper face, and a
/// lower face only when the axis does not start at 0.
bool near_truncation_edge(const LatticeDomain& d, const Point& p, int inset);

/// Exponential: phi_hat = exp(G) phi, available when G has no t or d/dt part.
/// FirstOrder: phi_hat = phi + delta_L phi with oracle time derivatives.
enum class Variation { Auto, Exponential, FirstOrder };

struct InvarianceOptions {
    int inset = 2;  ///< truncation layers excluded from the residual norm
    SpinBlock spin = SpinBlock::scalar();
    BoostForm boost = BoostForm::AsPrinted;
    Variation variation = Variation::Auto;
    double solution_tol = 1e-9;  ///< relative base residual accepted as a solution
};

struct InvarianceResidual {
    double t = 0.0;
    double residual = 0.0;  ///< ||E[phi_hat]|| away from the truncation edges
    double base = 0.0;      ///< ||E[phi]|| on the same points
    double floor = 0.0;     ///< max(base, rounding level of the operator terms)
    bool first_order = false;
};

/// Applies the equation operator to the transformed oracle field. Raises
/// NotASolution when the oracle itself misses the equation.
InvarianceResidual invariance_residual(const OracleSolution& sol, const PoincareParams& params, double t,
                                       const InvarianceOptions& opt = {});

struct OrderReport {
    double eps = 0.0;
    InvarianceResidual at_eps, at_half;
    double ratio = 0.0;  ///< residual(eps) / residual(eps / 2)

    bool below_floor(double factor = 10.0) const {
        return at_eps.residual <= factor * at_eps.floor && at_half.residual <= factor * at_half.floor;
    }
    bool ratio_in(double lo, double hi) const { return ratio >= lo && ratio <= hi; }
};

/// Residual at eps * unit and eps/2 * unit.
OrderReport residual_order(const OracleSolution& sol, const PoincareParams& unit, double eps, double t,
                           const InvarianceOptions& opt = {});

struct FiniteOptions {
    Rep rep = Rep::DifferenceRep;
    SpinBlock spin = SpinBlock::scalar();
    double constraint_tol = 1e-10;
    bool check_support = true;
    int support_inset = 2;
    double support_tol = 1e-8;  ///< relative to max |phi|
    BoostForm boost = BoostForm::AsPrinted;
};

/// exp(G(a, (omega - omega^T)/2)) phi, exponentiated on the axes the
/// parameters touch. Raises LorentzConstraintViolated, SupportTooWide, and
/// UnsupportedTransform for boosts or time shifts in the difference-differential
/// representation (use the history overload for time shifts).
ComplexField finite_transform(const ComplexField& phi, const FinitePoincare& f, const FiniteOptions& opt = {});

/// Difference-differential form with a time shift: exp(-a^4 d/dt) acts as
/// phi(t - a^4), read from `history`; the spatial part is exponentiated as above.
ComplexField finite_transform(const std::function<ComplexField(double)>& history, double t, const FinitePoincare& f,
                              const FiniteOptions& opt = {});

/// Full exp(G) for the time-independent part of the generator. Meant for
/// small hulls (dense matrix of hull_size * components).
Eigen::MatrixXcd transform_matrix(const PoincareParams& params, Rep rep, const SpinBlock& spin,
                                  const LatticeDomain& d);

struct NormReport {
    double norm2 = 0.0;
    double norm2_varied = 0.0;  ///< ||phi + delta_L phi||^2
    double first_order = 0.0;   ///< 2 Re <phi, delta_L phi>
};

NormReport norm_invariance_check(const ComplexField& phi, const PoincareParams& params,
                                 const SpinBlock& spin = SpinBlock::scalar());

struct Snapshot {
    double t = 0.0;
    ComplexField phi, dt_phi;
};

/// Difference-differential norm: the time integral is the trapezoid rule over
/// the snapshots. The window must close: |phi|^2 summed over space has to agree
/// at both ends to `window_tol` (relative), otherwise WindowTooNarrow.
NormReport norm_invariance_check(const std::vector<Snapshot>& snaps, const PoincareParams& params,
                                 const SpinBlock& spin = SpinBlock::scalar(), BoostForm boost = BoostForm::AsPrinted,
                                 double window_tol = 1e-8);

}  // namespace dps
