#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace babagrid {

enum class ErrorKind {
  UnknownChar,
  RaggedGrid,
  InvalidGrid,
  SchemaViolation,
  UnknownNoun,
  InvalidAction,
  GenerationExhausted,
  IoError,
  OracleFailure,
  SynthesisFailure,
  ProtocolError,
  Timeout,
  AnnotationConflict,
  MissingScenario,
  NonfiniteProbability,
  TemplateRenderError,
  KernelRejected,
};

std::string_view error_kind_name(ErrorKind kind);

// Every failure surfaced by the library carries a kind so callers (and the CLI
// exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace babagrid
