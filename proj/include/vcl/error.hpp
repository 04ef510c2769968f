#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vcl {

enum class ErrorKind {
  InvalidArgument,
  NoSignChange,
  MaxIterations,
  SubdivisionLimit,
  DomainError,
  EvanescentError,
  RootScanOverflow,
  NotConverged,
  NegativeArgument,
  OffShell,
  KTooSmall,
  ParseError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace vcl
