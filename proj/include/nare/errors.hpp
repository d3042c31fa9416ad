#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace nare {

enum class ErrorCode {
  SingularMatrix,
  RankDeficient,
  NoConvergence,
  DimensionCap,
  InvalidArgument,
  DegenerateDenominator,
  ZeroReference,
  PoleHit,
  InitSingular,
  Breakdown,
  ClassificationAmbiguous,
  NotMMatrix,
  SingularH,
  CentralPairIllConditioned,
  KMaxReached,
  DegenerateSpectrum,
  UVSingular,
  OrthogonalPair,
  NotInvariant,
  MatchFailure,
  QuadratureFailure,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure in the library is reported as an `Error` carrying a
/// machine-readable code. `stage` is filled in by pipelines (SuShi) so the
/// caller can tell which step failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::string stage = {})
      : std::runtime_error(what), code_(code), stage_(std::move(stage)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }

  void set_stage(std::string stage) { stage_ = std::move(stage); }

 private:
  ErrorCode code_;
  std::string stage_;
};

/// SDA breakdown: I - G_k H_k numerically singular.
class BreakdownError : public Error {
 public:
  BreakdownError(int step, double condition)
      : Error(ErrorCode::Breakdown,
              "SDA breakdown at step " + std::to_string(step) +
                  " (condition estimate " + std::to_string(condition) + ")"),
        step_(step),
        condition_(condition) {}

  int step() const noexcept { return step_; }
  double condition() const noexcept { return condition_; }

 private:
  int step_;
  double condition_;
};

inline void require(bool cond, const std::string& what,
                    ErrorCode code = ErrorCode::InvalidArgument) {
  if (!cond) throw Error(code, what);
}

}  // namespace nare
