#pragma once

#include <stdexcept>
#include <string>

namespace lense {

/// Error categories. The CLI maps each category to a distinct exit code.
enum class ErrorKind {
  Parse,
  Validation,
  Lookup,
  Domain,
  Budget,
  Size,
  Split,
  Generation,
  DeadState,
  Config,
  Data,
  MissingArtifact,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

#define LENSE_DEFINE_ERROR(Name, Kind)                                   \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

LENSE_DEFINE_ERROR(ValidationError, Validation)
LENSE_DEFINE_ERROR(LookupError, Lookup)
LENSE_DEFINE_ERROR(DomainError, Domain)
LENSE_DEFINE_ERROR(BudgetError, Budget)
LENSE_DEFINE_ERROR(SizeError, Size)
LENSE_DEFINE_ERROR(SplitError, Split)
LENSE_DEFINE_ERROR(GenerationError, Generation)
LENSE_DEFINE_ERROR(DeadStateError, DeadState)
LENSE_DEFINE_ERROR(ConfigError, Config)
LENSE_DEFINE_ERROR(DataError, Data)
LENSE_DEFINE_ERROR(MissingArtifactError, MissingArtifact)
LENSE_DEFINE_ERROR(InternalError, Internal)

#undef LENSE_DEFINE_ERROR

}  // namespace lense
