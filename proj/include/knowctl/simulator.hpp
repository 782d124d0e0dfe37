#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "knowctl/game.hpp"
#include "knowctl/petri.hpp"
#include "knowctl/synthesis.hpp"

namespace knowctl {

constexpr std::int32_t kNotHung = -1;

/// One configuration of the controlled system.
struct ControlledConfig {
  Marking marking;
  std::vector<std::int32_t> hung_on;              // per process: supervisor index or kNotHung
  std::vector<PlaceSet> views;                    // per supervisor: joint local state of its hung processes
  std::vector<std::optional<std::uint32_t>> grants;  // per supervisor: pending single-shot Support
  std::vector<std::uint32_t> gamma;               // per process: past-automaton state (full flavor)

  friend bool operator==(const ControlledConfig&, const ControlledConfig&) = default;
  [[nodiscard]] std::size_t hash() const;
};

struct ConfigHash {
  std::size_t operator()(const ControlledConfig& c) const { return c.hash(); }
};

enum class EventKind { Hang, Unhang, Support, FireLocal, FireUncontrollable, Stale };
enum class UnhangReason { ViewChanged, CoSupported, UncontrollableFired };

struct Event {
  EventKind kind = EventKind::FireLocal;
  std::optional<std::size_t> process;
  std::optional<std::size_t> supervisor;
  std::optional<std::size_t> transition;
  PlaceSet payload;  // Hang: s⌈_π at emission
  UnhangReason reason = UnhangReason::ViewChanged;
  bool granted = false;  // FireLocal enabled by a supervisor grant

  [[nodiscard]] bool is_firing() const {
    return kind == EventKind::FireLocal || kind == EventKind::FireUncontrollable;
  }
  [[nodiscard]] bool is_internal() const { return kind == EventKind::Hang || kind == EventKind::Support; }
};

/// A choice offered to the scheduler.
struct Action {
  enum class Kind { Fire, Hang, Support };
  Kind kind;
  std::size_t index;                   // transition, process or supervisor
  std::optional<std::size_t> choice;   // Support: granted transition (default: canonical first)

  friend bool operator==(const Action&, const Action&) = default;
};

struct TraceStep {
  Event event;
  ControlledConfig config;  // after the event
};

enum class Termination { DeadlockInNet, StepBound, ControlledDeadlock };

struct Trace {
  ControlledConfig initial;
  std::vector<TraceStep> steps;
  std::string scheduler;
  std::uint64_t seed = 0;
  Termination termination = Termination::StepBound;
  std::size_t supervisor_count = 0;

  /// Transitions fired, in order.
  [[nodiscard]] std::vector<std::size_t> word() const;
};

/// The controlling transformation applied to a net: processes and
/// supervisors as agents acting on a shared configuration.
class ControlledSystem {
 public:
  /// Throws HashMismatch when the controller was built for another net.
  ControlledSystem(const Net& net, const ControllerArtifact& controller);

  [[nodiscard]] const Net& net() const { return *net_; }
  [[nodiscard]] const ControllerArtifact& controller() const { return *controller_; }

  [[nodiscard]] ControlledConfig initial() const;
  /// Enabled agent actions in canonical order: firings by transition, then
  /// hangs by process, then supports by supervisor.
  [[nodiscard]] std::vector<Action> available(const ControlledConfig& c) const;
  /// Events produced by one action; the firing (if any) comes first and is
  /// followed by the unhang/stale events it triggers.
  [[nodiscard]] std::vector<TraceStep> apply(const ControlledConfig& c, const Action& a) const;

  [[nodiscard]] TransitionSet support(const ControlledConfig& c, std::size_t process) const;
  [[nodiscard]] bool wants_to_hang(const ControlledConfig& c, std::size_t process) const;
  [[nodiscard]] bool idles(const ControlledConfig& c, std::size_t process) const;
  [[nodiscard]] ProcessSet hung_set(const ControlledConfig& c, std::size_t supervisor) const;
  /// Transitions a supervisor could grant from its current view.
  [[nodiscard]] TransitionSet grantable(const ControlledConfig& c, std::size_t supervisor) const;
  /// "active", "hung:<supervisor>" or "idle".
  [[nodiscard]] std::string status(const ControlledConfig& c, std::size_t process) const;
  /// Each supervisor's view equals the marking on own(hung set).
  [[nodiscard]] bool views_consistent(const ControlledConfig& c) const;
  /// Bound on controller-internal events between two firings.
  [[nodiscard]] std::size_t internal_bound() const;

 private:
  [[nodiscard]] PlaceSet weak_view(const Marking& s, std::size_t process) const;
  /// How an enabled t may fire here, if at all.
  [[nodiscard]] std::optional<Event> firing_event(const ControlledConfig& c, std::size_t t) const;
  void unhang(ControlledConfig& c, std::size_t process) const;

  const Net* net_;
  const ControllerArtifact* controller_;
  std::vector<PlaceSet> ngb_;
  bool full_;
};

class Scheduler {
 public:
  virtual ~Scheduler() = default;
  [[nodiscard]] virtual std::string name() const = 0;
  [[nodiscard]] virtual std::uint64_t seed() const { return 0; }
  /// Index into `actions`, or nullopt to stop (script exhausted).
  virtual std::optional<std::size_t> pick(const ControlledSystem& sys, const ControlledConfig& c,
                                          const std::vector<Action>& actions) = 0;
};

class RandomScheduler final : public Scheduler {
 public:
  explicit RandomScheduler(std::uint64_t seed) : seed_(seed), rng_(seed) {}
  [[nodiscard]] std::string name() const override { return "random"; }
  [[nodiscard]] std::uint64_t seed() const override { return seed_; }
  std::optional<std::size_t> pick(const ControlledSystem&, const ControlledConfig&,
                                  const std::vector<Action>& actions) override;

 private:
  std::uint64_t seed_;
  std::mt19937_64 rng_;
};

/// Delays firings as long as possible and then fires the last candidate.
class AdversarialScheduler final : public Scheduler {
 public:
  [[nodiscard]] std::string name() const override { return "adversarial"; }
  std::optional<std::size_t> pick(const ControlledSystem&, const ControlledConfig&,
                                  const std::vector<Action>& actions) override;
};

/// Lines of the form "fire <t>", "hang <process>", "support <supervisor>";
/// blank lines and lines starting with '#' are ignored.
class ScriptScheduler final : public Scheduler {
 public:
  /// Throws SchedulerScriptInvalid on a malformed line or unknown name.
  ScriptScheduler(const Net& net, const ControllerArtifact& controller, const std::string& text);
  [[nodiscard]] std::string name() const override { return "script"; }
  /// Throws SchedulerScriptInvalid when the scripted action is not available.
  std::optional<std::size_t> pick(const ControlledSystem&, const ControlledConfig&,
                                  const std::vector<Action>& actions) override;

 private:
  std::vector<std::pair<Action, std::string>> script_;
  std::size_t next_ = 0;
};

[[nodiscard]] Trace simulate(const ControlledSystem& sys, Scheduler& scheduler, std::size_t max_steps);

struct Violation {
  std::size_t index = 0;
  std::string message;
};

struct TraceVerdict {
  bool pass = true;
  std::vector<Violation> violations;
  std::vector<std::size_t> word;
};

/// Projects the trace onto net markings and checks it against N and I.
[[nodiscard]] TraceVerdict check_trace(const Net& net, const InvariantRelation& inv, const Trace& trace);

struct VerifyViolation {
  int check = 0;  // 1: fired outside R, 2: controlled deadlock, 3: internal run, 0: other
  std::string message;
  Marking witness;
};

struct VerifyVerdict {
  bool pass = true;
  std::vector<VerifyViolation> violations;
  std::size_t configurations = 0;
  std::size_t longest_internal_run = 0;
};

struct VerifyLimits {
  std::size_t max_configurations = std::size_t{1} << 22;
  std::size_t max_violations = 16;
};

/// Explores every interleaving of the controlled system, letting supervisors
/// grant any transition their table offers. Throws StateExplosion.
[[nodiscard]] VerifyVerdict exhaustive_verify(const ControlledSystem& sys, const SafeControl& safe,
                                              const VerifyLimits& limits = {});

[[nodiscard]] std::string to_string(EventKind kind);
[[nodiscard]] std::string to_string(UnhangReason reason);
[[nodiscard]] std::string to_string(Termination termination);

}  // namespace knowctl
