#pragma once

#include <stdexcept>
#include <string>

namespace dps {

/// Base of every error raised by the library. `what()` names the violated
/// identity or precondition.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define DPS_DEFINE_ERROR(Name)                                                                     \
    class Name : public Error {                                                                    \
    public:                                                                                        \
        explicit Name(const std::string& msg) : Error(#Name ": " + msg) {}                        \
    }

// lattice
DPS_DEFINE_ERROR(DimensionError);
DPS_DEFINE_ERROR(BoundsError);
DPS_DEFINE_ERROR(ComponentError);
DPS_DEFINE_ERROR(AxisError);
DPS_DEFINE_ERROR(DomainMismatch);
DPS_DEFINE_ERROR(RangeError);
DPS_DEFINE_ERROR(HaloMissing);

// phase_ops
DPS_DEFINE_ERROR(SizeError);
DPS_DEFINE_ERROR(SizeMismatch);
DPS_DEFINE_ERROR(ConvergenceError);
DPS_DEFINE_ERROR(SpinShapeError);
DPS_DEFINE_ERROR(NotHermitian);

// gauss_conservation
DPS_DEFINE_ERROR(NotConserved);
DPS_DEFINE_ERROR(BoundaryFlux);
DPS_DEFINE_ERROR(TailTooLarge);

// covariance
DPS_DEFINE_ERROR(MissingTimeDerivative);
DPS_DEFINE_ERROR(NotASolution);
DPS_DEFINE_ERROR(LorentzConstraintViolated);
DPS_DEFINE_ERROR(SupportTooWide);
DPS_DEFINE_ERROR(WindowTooNarrow);
DPS_DEFINE_ERROR(UnsupportedTransform);

// variational
DPS_DEFINE_ERROR(QuadratureWindowError);
DPS_DEFINE_ERROR(ProbeOnBoundary);
DPS_DEFINE_ERROR(InteriorVariation);

// noether
DPS_DEFINE_ERROR(SnapshotCountError);
DPS_DEFINE_ERROR(NotGaugeInvariant);

// evolution
DPS_DEFINE_ERROR(StabilityViolation);

// cli
DPS_DEFINE_ERROR(ConfigError);
DPS_DEFINE_ERROR(IoError);

#undef DPS_DEFINE_ERROR

}  // namespace dps
