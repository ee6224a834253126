#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace twsbench {

enum class ErrorKind {
  Schema,
  MissingValue,
  Gap,
  OrphanBasin,
  OutOfRange,
  EmptySplit,
  Degenerate,
  InvalidConfig,
  InsufficientHistory,
  SplitLeakage,
  WindowTooLarge,
  EmptyInput,
  NonFinite,
  InvalidParams,
  ShapeMismatch,
  UnknownScheme,
  Divergence,
  UntrainedModel,
  ManifestMismatch,
  MissingCell,
  ResolutionMismatch,
  HorizonExceedsSplit,
  Io,
  MissingReport,
};

std::string_view to_string(ErrorKind kind);

// All library failures surface as this exception; `kind` is stable for callers
// that need to branch (the CLI maps kinds to exit codes).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace twsbench
