#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "knowctl/game.hpp"
#include "knowctl/knowledge.hpp"
#include "knowctl/petri.hpp"

namespace knowctl {

/// (view, Π) with view ⊆ own(Π).
struct JointLocalState {
  PlaceSet view;
  ProcessSet procs;

  friend bool operator==(const JointLocalState&, const JointLocalState&) = default;
};

/// Canonical order: fewer processes first, then by process set, then view.
struct JointLess {
  bool operator()(const JointLocalState& a, const JointLocalState& b) const;
};

/// e ⊑ q: Π_e ⊆ Π_q and q agrees with e on own(Π_e).
[[nodiscard]] bool subsumed_by(const Net& net, const JointLocalState& e, const JointLocalState& q);

struct SupportEntry {
  JointLocalState state;
  TransitionSet supports;
};

struct SupportTable {
  std::string name;
  ProcessSet procs;
  std::vector<SupportEntry> entries;  // canonical order

  /// Entries e with e ⊑ q.
  [[nodiscard]] std::vector<const SupportEntry*> matching(const Net& net, const JointLocalState& q) const;
};

using LocalTable = std::map<PlaceSet, TransitionSet, CanonicalLess>;
using FlagTable = std::map<PlaceSet, bool, CanonicalLess>;

/// Full-flavor runtime data for one process: the past automaton with the
/// support set and hang flag of every Γ.
struct PastTable {
  struct State {
    std::vector<Marking> members;
    TransitionSet supports;
    bool hang = false;
  };
  std::uint32_t initial = 0;
  std::vector<State> states;
  std::vector<PastAutomaton::Transition> edges;

  [[nodiscard]] std::optional<std::uint32_t> step(std::uint32_t from, std::size_t t) const;
};

enum class SupervisorMode { FromFile, Single };

struct SynthesisOptions {
  SupervisorMode supervisors = SupervisorMode::FromFile;
  KappaFlavor flavor = KappaFlavor::Simplified;
  std::size_t delay_depth = 0;
  bool force = false;
  std::optional<OrderPairs> order;  // overrides the net's order when set
};

struct ProgressVerdict {
  bool holds = true;
  std::optional<Marking> counterexample;
};

struct ControllerArtifact {
  std::string net_hash;
  KappaFlavor flavor = KappaFlavor::Simplified;
  std::size_t delay_depth = 0;
  std::vector<LocalTable> local_tables;  // per process
  std::vector<FlagTable> hang_tables;    // per process
  std::vector<FlagTable> idle_tables;    // per process; empty without an order
  std::vector<SupportTable> supervisors;
  OrderPairs order;
  std::vector<PastTable> past_tables;    // per process; full flavor only
  ProgressVerdict progress;

  /// Index of the supervisor whose scope holds the process, if any.
  [[nodiscard]] std::optional<std::size_t> supervisor_of(std::size_t process) const;
};

/// {t ∈ π | K^w_π good(t)} per weak view of π over the universe.
[[nodiscard]] LocalTable local_support_table(const KnowledgeEvaluator& ev, std::size_t process);

/// ∩ of R over the universe states whose local state on Π equals q.view.
/// Throws UnrealizedJointState.
[[nodiscard]] TransitionSet supp(const KnowledgeEvaluator& ev, const JointLocalState& q);

/// Minimal-supporting DFS over the joint local states of `procs`. Throws
/// CoverageGap when some good state in scope is neither locally supported
/// nor subsumed by a stored entry.
[[nodiscard]] SupportTable build_supervisor_table(const KnowledgeEvaluator& ev, const std::string& name,
                                                  const ProcessSet& procs, std::size_t delay_depth = 0);

/// Whether every ⇝-predecessor of q has no support within `scope`.
[[nodiscard]] bool is_minimal_supporting(const KnowledgeEvaluator& ev, const JointLocalState& q,
                                         const ProcessSet& scope);

/// Supervisor partition chosen by the options.
[[nodiscard]] std::vector<Supervisor> partition_for(const Net& net, SupervisorMode mode);

/// Every non-deadlock good state has a local supporter or a supervisor whose
/// joint strong knowledge supports a transition of its processes.
[[nodiscard]] ProgressVerdict check_progress_criterion(const KnowledgeEvaluator& ev,
                                                       const std::vector<Supervisor>& partition);

/// π idles at a view when it knows that, for some supervisor, the processes
/// strictly above π jointly know a good transition of theirs.
/// Throws InvalidOrder for a cyclic order.
[[nodiscard]] FlagTable ordered_idle_table(const KnowledgeEvaluator& ev, std::size_t process,
                                           const OrderPairs& order, const std::vector<Supervisor>& partition);

/// Hang flag per weak view: true where κ^π fails.
[[nodiscard]] FlagTable hang_table(const KnowledgeEvaluator& ev, std::size_t process, KappaFlavor flavor);

[[nodiscard]] PastTable past_table(const KnowledgeEvaluator& ev, std::size_t process);

/// Throws NotWinnable, and ProgressCriterionFailed unless options.force.
[[nodiscard]] ControllerArtifact emit_controller(const KnowledgeEvaluator& ev, const SynthesisOptions& options);

}  // namespace knowctl
