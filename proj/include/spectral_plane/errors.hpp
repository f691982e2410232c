#pragma once

#include <stdexcept>
#include <string>

namespace spectral_plane {

// Base class for everything this library throws on its own behalf.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- configuration ---
struct OrderingViolation : Error { using Error::Error; };
struct AngleCollision : Error { using Error::Error; };
struct TooLargeT : Error { using Error::Error; };
struct BadHalfGenus : Error { using Error::Error; };
struct MarginViolation : Error { using Error::Error; };

// --- closed forms / node pairs ---
struct SingularPair : Error { using Error::Error; };

// --- elliptic curve evaluation ---
struct RootSeparationFailure : Error { using Error::Error; };
struct TrackingLoss : Error { using Error::Error; };
struct QuadratureDivergence : Error { using Error::Error; };

// --- plane algebra ---
struct DegeneratePlane : Error { using Error::Error; };
struct PoleProximity : Error { using Error::Error; };
struct NonDiagonalBlocks : Error { using Error::Error; };

// --- search ---
struct NonConvergence : Error { using Error::Error; };
struct LeftTrustRegion : Error { using Error::Error; };
struct ModelUnavailable : Error { using Error::Error; };
struct CertificationFailed : Error { using Error::Error; };

} // namespace spectral_plane
