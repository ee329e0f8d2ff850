#include "genjac/types.hpp"

namespace genjac {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularCurve: return "SingularCurve";
    case ErrorCode::BadDegree: return "BadDegree";
    case ErrorCode::AtBranchPoint: return "AtBranchPoint";
    case ErrorCode::SheetAmbiguity: return "SheetAmbiguity";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::NonCanonicalBasis: return "NonCanonicalBasis";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::PoleAtBranch: return "PoleAtBranch";
    case ErrorCode::CoincidentPoles: return "CoincidentPoles";
    case ErrorCode::PathBlocked: return "PathBlocked";
    case ErrorCode::DivisorTouchesPole: return "DivisorTouchesPole";
    case ErrorCode::CycleTouchesPole: return "CycleTouchesPole";
    case ErrorCode::ContourThroughZero: return "ContourThroughZero";
    case ErrorCode::IllConditionedLattice: return "IllConditionedLattice";
    case ErrorCode::BoundaryTooClose: return "BoundaryTooClose";
    case ErrorCode::NonIntegerWinding: return "NonIntegerWinding";
    case ErrorCode::IdenticallyZero: return "IdenticallyZero";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::NewtonStall: return "NewtonStall";
    case ErrorCode::NotOnThetaDivisor: return "NotOnThetaDivisor";
    case ErrorCode::BasePointZeroMissing: return "BasePointZeroMissing";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io: return 2;
    case ErrorCode::SingularCurve:
    case ErrorCode::BadDegree:
    case ErrorCode::DegenerateGeometry:
    case ErrorCode::NonCanonicalBasis: return 3;
    case ErrorCode::IdenticallyZero:
    case ErrorCode::IllConditioned:
    case ErrorCode::IllConditionedLattice:
    case ErrorCode::CountMismatch:
    case ErrorCode::NewtonStall:
    case ErrorCode::QuadratureFailure:
    case ErrorCode::BasePointZeroMissing:
    case ErrorCode::NonIntegerWinding:
    case ErrorCode::ContourThroughZero:
    case ErrorCode::BoundaryTooClose:
    case ErrorCode::SheetAmbiguity: return 5;
    default: return 4;
  }
}

}  // namespace genjac
