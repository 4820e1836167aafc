#pragma once

#include <stdexcept>
#include <string>

namespace acoustolab {

// Base class for all errors raised by the library. Every failure mode the
// numerical layers can detect maps to one of the derived types below, so
// callers (CLI, tests) can react to the failure class rather than parse
// message strings.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// -- geometry ---------------------------------------------------------------
struct NotOnBoundary : Error { using Error::Error; };      // normal queried off Gamma
struct RegionOutsideDomain : Error { using Error::Error; };

// -- discretization ---------------------------------------------------------
struct UnsupportedDomain : Error { using Error::Error; };  // e.g. PDE ops on the disk
struct ResolutionTooCoarse : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };

// -- semigroup / kernel -----------------------------------------------------
struct SolverFailure : Error { using Error::Error; };      // factorization or refinement failed
struct ThresholdAmbiguous : Error { using Error::Error; }; // singular values inside the rank-decision band
struct EmptyTrajectory : Error { using Error::Error; };

// -- spectral ---------------------------------------------------------------
struct SingularAtMu : Error { using Error::Error; };       // i*mu is (numerically) an eigenvalue
struct ConvergenceFailure : Error { using Error::Error; };
struct EmptyGrid : Error { using Error::Error; };

// -- rays -------------------------------------------------------------------
struct DegenerateDirection : Error { using Error::Error; }; // |xi| not on the unit sphere
struct GlideOnFlatSide : Error { using Error::Error; };

// -- husimi -----------------------------------------------------------------
struct ResolutionGuard : Error { using Error::Error; };    // grid too coarse for the requested h
struct ZeroMass : Error { using Error::Error; };

// -- cli / config -----------------------------------------------------------
struct ConfigInvalid : Error { using Error::Error; };

}  // namespace acoustolab
