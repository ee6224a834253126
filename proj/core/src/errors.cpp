#include "twsbench/errors.hpp"

namespace twsbench {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Schema: return "schema";
    case ErrorKind::MissingValue: return "missing-value";
    case ErrorKind::Gap: return "gap";
    case ErrorKind::OrphanBasin: return "orphan-basin";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::EmptySplit: return "empty-split";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::InvalidConfig: return "invalid-config";
    case ErrorKind::InsufficientHistory: return "insufficient-history";
    case ErrorKind::SplitLeakage: return "split-leakage";
    case ErrorKind::WindowTooLarge: return "window-too-large";
    case ErrorKind::EmptyInput: return "empty-input";
    case ErrorKind::NonFinite: return "non-finite";
    case ErrorKind::InvalidParams: return "invalid-params";
    case ErrorKind::ShapeMismatch: return "shape-mismatch";
    case ErrorKind::UnknownScheme: return "unknown-scheme";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::UntrainedModel: return "untrained-model";
    case ErrorKind::ManifestMismatch: return "manifest-mismatch";
    case ErrorKind::MissingCell: return "missing-cell";
    case ErrorKind::ResolutionMismatch: return "resolution-mismatch";
    case ErrorKind::HorizonExceedsSplit: return "horizon-exceeds-split";
    case ErrorKind::Io: return "io";
    case ErrorKind::MissingReport: return "missing-report";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace twsbench
