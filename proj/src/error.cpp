#include "knowctl/error.hpp"

namespace knowctl {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "Syntax";
    case ErrorKind::UnknownPlace: return "UnknownPlace";
    case ErrorKind::UnknownTransition: return "UnknownTransition";
    case ErrorKind::UnknownProcess: return "UnknownProcess";
    case ErrorKind::UnknownSupervisor: return "UnknownSupervisor";
    case ErrorKind::DuplicateName: return "DuplicateName";
    case ErrorKind::UncoveredTransition: return "UncoveredTransition";
    case ErrorKind::CyclicPriority: return "CyclicPriority";
    case ErrorKind::OverlappingSupervisors: return "OverlappingSupervisors";
    case ErrorKind::CapacityExceeded: return "CapacityExceeded";
    case ErrorKind::MalformedPredicate: return "MalformedPredicate";
    case ErrorKind::MalformedFormula: return "MalformedFormula";
    case ErrorKind::InnerKp: return "InnerKp";
    case ErrorKind::NotEnabled: return "NotEnabled";
    case ErrorKind::StateExplosion: return "StateExplosion";
    case ErrorKind::StateNotInUniverse: return "StateNotInUniverse";
    case ErrorKind::UnrealizedJointState: return "UnrealizedJointState";
    case ErrorKind::NotWinnable: return "NotWinnable";
    case ErrorKind::ProgressCriterionFailed: return "ProgressCriterionFailed";
    case ErrorKind::CoverageGap: return "CoverageGap";
    case ErrorKind::InvalidOrder: return "InvalidOrder";
    case ErrorKind::HashMismatch: return "HashMismatch";
    case ErrorKind::SchedulerScriptInvalid: return "SchedulerScriptInvalid";
    case ErrorKind::Io: return "Io";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
      return 2;
    case ErrorKind::Io:
      return 3;
    case ErrorKind::Syntax:
    case ErrorKind::MalformedPredicate:
    case ErrorKind::MalformedFormula:
    case ErrorKind::InnerKp:
      return 4;
    case ErrorKind::UnknownPlace:
    case ErrorKind::UnknownTransition:
    case ErrorKind::UnknownProcess:
    case ErrorKind::UnknownSupervisor:
    case ErrorKind::DuplicateName:
    case ErrorKind::UncoveredTransition:
    case ErrorKind::CyclicPriority:
    case ErrorKind::OverlappingSupervisors:
    case ErrorKind::CapacityExceeded:
    case ErrorKind::InvalidOrder:
      return 5;
    case ErrorKind::StateExplosion:
      return 6;
    case ErrorKind::NotEnabled:
    case ErrorKind::StateNotInUniverse:
    case ErrorKind::UnrealizedJointState:
      return 7;
    case ErrorKind::NotWinnable:
    case ErrorKind::ProgressCriterionFailed:
    case ErrorKind::CoverageGap:
      return 8;
    case ErrorKind::HashMismatch:
    case ErrorKind::SchedulerScriptInvalid:
      return 9;
  }
  return 10;
}

}  // namespace knowctl
