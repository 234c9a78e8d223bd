#include "pcase/error.hpp"

namespace pcase {

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::OpenType: return "OpenType";
    case ErrorKind::UnboundVariable: return "UnboundVariable";
    case ErrorKind::UnboundTypeVar: return "UnboundTypeVar";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::AmbiguousConstant: return "AmbiguousConstant";
    case ErrorKind::NoUpperBound: return "NoUpperBound";
    case ErrorKind::NotApplicative: return "NotApplicative";
    case ErrorKind::NotARedex: return "NotARedex";
    case ErrorKind::ResourceLimit: return "ResourceLimit";
    case ErrorKind::Inconsistent: return "Inconsistent";
    case ErrorKind::NotMonotone: return "NotMonotone";
    case ErrorKind::NotNormalForm: return "NotNormalForm";
    case ErrorKind::NotAPrefix: return "NotAPrefix";
    case ErrorKind::NotAProgram: return "NotAProgram";
    case ErrorKind::InvalidElement: return "InvalidElement";
  }
  return "Error";
}

Error::Error(ErrorKind kind, const std::string& msg)
    : std::runtime_error(std::string(error_kind_name(kind)) + ": " + msg), kind_(kind) {}

void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

}  // namespace pcase
