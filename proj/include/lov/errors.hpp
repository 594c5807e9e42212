#pragma once

#include <stdexcept>
#include <string>

namespace lov {

enum class ErrorKind {
  ModeMismatch,
  BadMode,
  BadInput,
  BadIndex,
  ArityMismatch,
  SyntaxError,
  SemanticError,
  SchemaError,
  NotUnitary,
  NotRealRotation,
  NotLOpp,
  NotTmn,
  NotTrec,
  NotARedex,
  DimMismatch,
  InvariantViolation,
  PhotonCapExceeded,
  StepLimitExceeded,
  CostGuard,
  Internal,
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::ModeMismatch: return "ModeMismatch";
    case ErrorKind::BadMode: return "BadMode";
    case ErrorKind::BadInput: return "BadInput";
    case ErrorKind::BadIndex: return "BadIndex";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::SemanticError: return "SemanticError";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::NotRealRotation: return "NotRealRotation";
    case ErrorKind::NotLOpp: return "NotLOpp";
    case ErrorKind::NotTmn: return "NotTmn";
    case ErrorKind::NotTrec: return "NotTrec";
    case ErrorKind::NotARedex: return "NotARedex";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::PhotonCapExceeded: return "PhotonCapExceeded";
    case ErrorKind::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorKind::CostGuard: return "CostGuard";
    case ErrorKind::Internal: return "Internal";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string("error[") + error_kind_name(kind) +
                           "]: " + msg),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

}  // namespace lov
