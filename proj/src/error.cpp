#include "crq/error.hpp"

namespace crq {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::ZeroStart: return "ZeroStart";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::MaxIter: return "MaxIter";
    case ErrorCode::NoRealEigenvalue: return "NoRealEigenvalue";
    case ErrorCode::DegenerateEigenvector: return "DegenerateEigenvector";
    case ErrorCode::EigFailure: return "EigFailure";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::SingularH: return "SingularH";
    case ErrorCode::VerificationFailed: return "VerificationFailed";
    case ErrorCode::EmptySide: return "EmptySide";
    case ErrorCode::IsolatedPixel: return "IsolatedPixel";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace crq
