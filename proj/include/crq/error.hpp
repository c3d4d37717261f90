#pragma once

#include <stdexcept>
#include <string>

namespace crq {

/// Failure categories raised by the toolkit.
enum class ErrorCode {
  InvalidArgument,
  RankDeficient,
  ZeroStart,
  NoRoot,
  MaxIter,
  NoRealEigenvalue,
  DegenerateEigenvector,
  EigFailure,
  Infeasible,
  NotConverged,
  TooLarge,
  BracketFailure,
  SingularH,
  VerificationFailed,
  EmptySide,
  IsolatedPixel,
  Io,
};

const char* to_string(ErrorCode code);

/// Exception carrying an ErrorCode.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace crq
