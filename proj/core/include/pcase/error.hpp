#pragma once

#include <stdexcept>
#include <string>

namespace pcase {

enum class ErrorKind {
  SyntaxError,
  OpenType,
  UnboundVariable,
  UnboundTypeVar,
  TypeMismatch,
  AmbiguousConstant,
  NoUpperBound,
  NotApplicative,
  NotARedex,
  ResourceLimit,
  Inconsistent,
  NotMonotone,
  NotNormalForm,
  NotAPrefix,
  NotAProgram,
  InvalidElement,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg);
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& msg);

}  // namespace pcase
