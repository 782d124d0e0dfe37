#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace knowctl {

enum class ErrorKind {
  Syntax,
  UnknownPlace,
  UnknownTransition,
  UnknownProcess,
  UnknownSupervisor,
  DuplicateName,
  UncoveredTransition,
  CyclicPriority,
  OverlappingSupervisors,
  CapacityExceeded,
  MalformedPredicate,
  MalformedFormula,
  InnerKp,
  NotEnabled,
  StateExplosion,
  StateNotInUniverse,
  UnrealizedJointState,
  NotWinnable,
  ProgressCriterionFailed,
  CoverageGap,
  InvalidOrder,
  HashMismatch,
  SchedulerScriptInvalid,
  Io,
  InvalidArgument,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

std::string_view to_string(ErrorKind kind);

/// Process exit code for an error class. 0 and 1 are reserved for
/// "predicate holds" and "predicate does not hold".
int exit_code(ErrorKind kind);

}  // namespace knowctl
