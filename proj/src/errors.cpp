#include "nare/errors.hpp"

namespace nare {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DimensionCap: return "DimensionCap";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::ZeroReference: return "ZeroReference";
    case ErrorCode::PoleHit: return "PoleHit";
    case ErrorCode::InitSingular: return "InitSingular";
    case ErrorCode::Breakdown: return "Breakdown";
    case ErrorCode::ClassificationAmbiguous: return "ClassificationAmbiguous";
    case ErrorCode::NotMMatrix: return "NotMMatrix";
    case ErrorCode::SingularH: return "SingularH";
    case ErrorCode::CentralPairIllConditioned: return "CentralPairIllConditioned";
    case ErrorCode::KMaxReached: return "KMaxReached";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::UVSingular: return "UVSingular";
    case ErrorCode::OrthogonalPair: return "OrthogonalPair";
    case ErrorCode::NotInvariant: return "NotInvariant";
    case ErrorCode::MatchFailure: return "MatchFailure";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace nare
