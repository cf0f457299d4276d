#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dps/lattice.hpp"

namespace dps {

enum class OpKind { DeltaRight, DeltaLeft, DeltaSharp, P, Q, SqrtIndex, Identity };

std::string to_string(OpKind k);

/// Dense one-axis operator on the index range [first, first + size - 1].
/// Columns are coordinate vectors; indices outside the range count as zero.
struct OperatorMatrix {
    Eigen::MatrixXcd entries;
    std::string label;
    int first = 0;

    int size() const { return static_cast<int>(entries.rows()); }
};

/// Real matrix of a real operator kind. P is rejected (it is imaginary).
Eigen::MatrixXd real_op(OpKind kind, int size, int first = 0);

OperatorMatrix op_matrix(OpKind kind, int size, int first = 0);

struct CommutatorReport {
    double deviation = 0.0;  ///< max |(QP - PQ) - i eta I| over the checked block
    int rows_checked = 0;
};

/// Compares QP - PQ with i*eta*I on the block at distance >= inset from the
/// truncation edges (the lower edge only counts when `first` > 0).
CommutatorReport commutator_check(const OperatorMatrix& P, const OperatorMatrix& Q, int inset = 2,
                                  double eta = 1.0);

struct Spectrum {
    Eigen::VectorXd values;   ///< ascending
    Eigen::MatrixXcd vectors; ///< orthonormal columns
};

/// Eigenpairs of a hermitian matrix. Non-hermitian input raises NotHermitian.
Spectrum spectrum(const OperatorMatrix& m);
Spectrum spectrum(const Eigen::MatrixXcd& m);

/// Infinitesimal Poincare parameters eps^mu and eps^{mu nu} (upper indices).
/// Axis 3 is the time-like one.
struct PoincareParams {
    std::array<double, 4> eps{};
    Eigen::Matrix4d eps2 = Eigen::Matrix4d::Zero();

    static PoincareParams translation(int axis, double value);
    /// eps^{mu nu} = value, eps^{nu mu} = -value.
    static PoincareParams rotation(int mu, int nu, double value);

    PoincareParams scaled(double s) const;
    PoincareParams operator+(const PoincareParams& o) const;
    bool is_zero() const;
    bool has_boost() const;  ///< any eps^{a4} with a spatial
};

/// Finite parameters: translation a^mu and omega^{mu sigma} = eta^{sigma nu} (l^mu_nu - delta^mu_nu).
struct FinitePoincare {
    std::array<double, 4> a{};
    Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();

    static FinitePoincare from_lorentz(const Eigen::Matrix4d& ell, const std::array<double, 4>& a = {});
    /// omega_{ab} + omega_{ba} + eta_{mn} omega^m_a omega^n_b, which vanishes for a Lorentz matrix.
    Eigen::Matrix4d constraint() const;
    /// Infinitesimal parameters whose exponential gives this transform.
    PoincareParams generator_params() const;
};

/// Rotation by `angle` in the (mu, nu) plane, both spatial.
Eigen::Matrix4d lorentz_rotation(int mu, int nu, double angle);
/// Boost with rapidity `rapidity` along spatial axis `a`.
Eigen::Matrix4d lorentz_boost(int a, double rapidity);

enum class Rep { DifferenceRep, DiffDiffRep };

std::string to_string(Rep r);

/// Boost block of the difference-differential generator.
/// AsPrinted: -(1/sqrt2) k_a [(D_a sqrt(n) - sqrt(n) D'_a) d/dt - t D#_a], as written in the
/// literature this library follows.
/// FromGenerator: -k_a [Q_a d/dt + t D#_a], obtained from the abstract generator with
/// P_4 = i d/dt and Q_4 = t; this form satisfies the first-order invariance condition.
/// In the difference representation FromGenerator takes Q_4 = -X_4, with X the lattice
/// position operator, so that [Q_4, P_4] = i eta_44; AsPrinted uses X_4.
enum class BoostForm { AsPrinted, FromGenerator };

/// Spin matrices S_{mu nu} acting on the field components.
struct SpinBlock {
    int components = 1;
    std::array<std::array<Eigen::MatrixXcd, 4>, 4> S;

    static SpinBlock scalar();
    /// S^alpha_{mu nu beta} = eta_{nu beta} delta^alpha_mu - eta_{mu beta} delta^alpha_nu.
    static SpinBlock vector();
};

/// delta_L phi = (constant + t * t_coeff) phi + dt_coeff * d/dt phi, on the
/// flattened hull (component-major, first axis fastest).
struct GeneratorMatrix {
    Eigen::MatrixXcd constant;
    Eigen::MatrixXcd t_coeff;
    Eigen::MatrixXcd dt_coeff;
    bool time_dependent = false;  ///< t_coeff nonzero
    bool needs_dt = false;        ///< dt_coeff nonzero

    Eigen::MatrixXcd at(double t) const { return time_dependent ? Eigen::MatrixXcd(constant + t * t_coeff) : constant; }
};

/// `time_axis` names the domain axis that carries n^4 in the difference
/// representation (it differs from 3 on sub-domains of the active axes).
GeneratorMatrix generator_matrix(const PoincareParams& params, Rep rep, const SpinBlock& spin,
                                 const LatticeDomain& domain, BoostForm boost = BoostForm::AsPrinted,
                                 int time_axis = 3);

/// Embeds a one-axis operator into the flattened hull of `d` (one component).
Eigen::MatrixXcd embed(const LatticeDomain& d, int axis, const Eigen::MatrixXcd& a);
/// Product of operators acting on two distinct axes.
Eigen::MatrixXcd embed_pair(const LatticeDomain& d, int axis_a, const Eigen::MatrixXcd& a, int axis_b,
                            const Eigen::MatrixXcd& b);

/// Axis-local operator for a domain axis: range [lower, upper].
OperatorMatrix axis_op(const LatticeDomain& d, int axis, OpKind kind);

}  // namespace dps
