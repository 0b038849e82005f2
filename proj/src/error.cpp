#include "babagrid/error.hpp"

namespace babagrid {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnknownChar: return "UnknownChar";
    case ErrorKind::RaggedGrid: return "RaggedGrid";
    case ErrorKind::InvalidGrid: return "InvalidGrid";
    case ErrorKind::SchemaViolation: return "SchemaViolation";
    case ErrorKind::UnknownNoun: return "UnknownNoun";
    case ErrorKind::InvalidAction: return "InvalidAction";
    case ErrorKind::GenerationExhausted: return "GenerationExhausted";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::OracleFailure: return "OracleFailure";
    case ErrorKind::SynthesisFailure: return "SynthesisFailure";
    case ErrorKind::ProtocolError: return "ProtocolError";
    case ErrorKind::Timeout: return "Timeout";
    case ErrorKind::AnnotationConflict: return "AnnotationConflict";
    case ErrorKind::MissingScenario: return "MissingScenario";
    case ErrorKind::NonfiniteProbability: return "NonfiniteProbability";
    case ErrorKind::TemplateRenderError: return "TemplateRenderError";
    case ErrorKind::KernelRejected: return "KernelRejected";
  }
  return "Error";
}

}  // namespace babagrid
