#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "dps/variational.hpp"

namespace dps {

/// A: all axes are lattice axes. B: lattice space with continuous time; the
/// last jet slot is d/dt.
enum class NoetherRep { A, B };

inline double default_charge() { return std::sqrt(4.0 * std::numbers::pi / 137.0); }

/// Translation currents T^nu_mu. Each component is stored on the hull plus the
/// upper halo layer along nu, which the right difference reads. Field
/// derivatives of L and L itself live on the hull only.
struct StressTensor {
    NoetherRep rep = NoetherRep::A;
    LatticeDomain domain;
    int axes = 0;                     ///< index range of nu and mu
    std::vector<ComplexField> t;      ///< t[nu * axes + mu] = T^nu_mu
    std::vector<bool> complete;       ///< per mu: the divergence form has no unwritten remainder

    const ComplexField& at(int nu, int mu) const { return t[static_cast<std::size_t>(nu * axes + mu)]; }
    ComplexField& at(int nu, int mu) { return t[static_cast<std::size_t>(nu * axes + mu)]; }
};

/// Rep A on the field's hull, or on a sub-domain `d` of it (HaloMissing when `d`
/// plus one layer leaves the stored region).
template <class Scalar>
StressTensor stress_tensor(const QuadraticLagrangian& L, const LatticeField<Scalar>& f);
template <class Scalar>
StressTensor stress_tensor(const QuadraticLagrangian& L, const LatticeField<Scalar>& f, const LatticeDomain& d);

/// Rep B at one instant: T^b_a, T^4_a, T^b_4 and T^4_4.
template <class Scalar>
StressTensor stress_tensor(const QuadraticLagrangian& L, const LatticeField<Scalar>& f, const LatticeField<Scalar>& dt_f);

/// d/dt of every rep B component, exact for quadratic L: the components are
/// second degree in (f, d/dt f), so a central difference along (d/dt f, d2/dt2 f)
/// with unit step has no truncation error.
template <class Scalar>
StressTensor stress_tensor_rate(const QuadraticLagrangian& L, const LatticeField<Scalar>& f,
                                const LatticeField<Scalar>& dt_f, const LatticeField<Scalar>& dt2_f);

struct ConservationReport {
    double t = 0.0;
    std::vector<ComplexField> residual;  ///< per mu, on the hull
    std::vector<double> max_abs;         ///< per mu
    std::vector<bool> complete;          ///< false: the residual is the unwritten remainder
};

/// Rep A: Delta_nu T^nu_mu.
ConservationReport conservation_residual(const StressTensor& T);
/// Rep B: Delta_b T^b_mu + d/dt T^4_mu with the rate supplied.
ConservationReport conservation_residual(const StressTensor& T, const StressTensor& rate);
/// Rep B over a uniform snapshot series, d/dt by central differences; one
/// report per inner snapshot. SnapshotCountError for fewer than three.
std::vector<ConservationReport> conservation_residual(const std::vector<StressTensor>& series,
                                                      const std::vector<double>& t);

/// Phase currents of a complex field. Stored like StressTensor components.
struct ChargeCurrent {
    NoetherRep rep = NoetherRep::A;
    LatticeDomain domain;
    double e = 0.0;
    std::vector<ComplexField> j;  ///< j[mu]; in rep B the last entry is j^4
};

/// NotGaugeInvariant unless L is complex, real-valued and unchanged to first
/// order by phi -> exp(i eps) phi for every jet: no linear term on any slot and
/// no plain-plain or conjugate-conjugate Hessian block.
void require_gauge_invariant(const QuadraticLagrangian& L, double tol = 1e-14);

ChargeCurrent charge_current(const QuadraticLagrangian& L, const ComplexField& phi, double e = default_charge());
ChargeCurrent charge_current(const QuadraticLagrangian& L, const ComplexField& phi, const ComplexField& dt_phi,
                             double e = default_charge());
/// d/dt of the rep B currents (exact, same scheme as stress_tensor_rate).
ChargeCurrent charge_current_rate(const QuadraticLagrangian& L, const ComplexField& phi, const ComplexField& dt_phi,
                                  const ComplexField& dt2_phi, double e = default_charge());

/// Delta_mu j^mu (rep A) or Delta_b j^b + d/dt j^4 (rep B with rate).
ComplexField current_divergence(const ChargeCurrent& j);
ComplexField current_divergence(const ChargeCurrent& j, const ChargeCurrent& rate);

/// Bracket of the first-order phase variation of L at each hull point:
/// dL/drho rho - dL/drho-bar rho-bar + dL/drho_mu rho_mu - dL/drho-bar_mu rho-bar_mu.
ComplexField gauge_bracket(const QuadraticLagrangian& L, const ComplexField& phi);

/// i [D#_mu(dL/drho_mu) phi + dL/drho_mu D#_mu phi] + c.c. at each hull point
/// (rep A, no equation of motion used).
ComplexField gauge_divergence_form(const QuadraticLagrangian& L, const ComplexField& phi);

/// Total charge at one instant: [-ie sum dL/drho_4 phi] + c.c.
Complex total_charge(const QuadraticLagrangian& L, const ComplexField& phi, const ComplexField& dt_phi,
                     double e = default_charge());
/// Rep A two-slice charge:
/// -(ie/sqrt2) sum_n [dL/drho_4(n, s1) phi(n, s2) + dL/drho_4(n, s2) phi(n, s1)] + c.c.
Complex total_charge_slices(const QuadraticLagrangian& L, const ComplexField& phi, double e = default_charge(),
                            int s1 = 1, int s2 = 2);

struct Totals {
    std::vector<Complex> P;  ///< P_mu = -sum T^4_mu over the slice
    Complex H{};             ///< -P_4
    Complex Q{};             ///< total charge formula, when a current was given
    Complex Q_current{};     ///< sum of j^4 over the same slice
    double shell_max = 0.0;  ///< max |T^4_4| (and |j^4|) on the upper hull faces
};

/// Rep B: sums over the spatial hull. Rep A: sums over the slice n^4 = `slice`
/// of the last axis. A positive `tail_tol` makes the shell maximum a hard
/// check (TailTooLarge). `q` is the value of the charge formula, passed through.
Totals totals(const StressTensor& T, const ChargeCurrent* j = nullptr, Complex q = {}, int slice = 2,
              double tail_tol = -1.0);

}  // namespace dps
