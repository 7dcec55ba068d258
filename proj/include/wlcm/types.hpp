#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace wlcm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  EmptyClass,
  AllZero,
  RhoOutOfRange,
  DomainViolation,
  RetriesExhausted,
  ConvergenceFailure,
  NonFinite,
  DegenerateInput,
  SingularClassMatrix,
  ZeroTheta,
  FileError,
  SchemaError,
  EmptyAfterFilter,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::AllZero: return "AllZero";
    case ErrorCode::RhoOutOfRange: return "RhoOutOfRange";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::RetriesExhausted: return "RetriesExhausted";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::SingularClassMatrix: return "SingularClassMatrix";
    case ErrorCode::ZeroTheta: return "ZeroTheta";
    case ErrorCode::FileError: return "FileError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::EmptyAfterFilter: return "EmptyAfterFilter";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Process exit status for the command-line front end: 1 usage, 2 data, 3 numerical.
inline int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConvergenceFailure:
    case ErrorCode::NonFinite:
    case ErrorCode::SingularClassMatrix:
    case ErrorCode::DegenerateInput:
      return 3;
    case ErrorCode::InvalidArgument:
    case ErrorCode::RhoOutOfRange:
      return 1;
    default:
      return 2;
  }
}

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

inline bool all_finite(const Eigen::Ref<const Matrix>& m) { return m.allFinite(); }

}  // namespace wlcm
