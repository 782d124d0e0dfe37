#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "knowctl/bitset.hpp"
#include "knowctl/formula.hpp"

namespace knowctl {

// ---------------------------------------------------------------------------
// Name-level description, as read from a net file. Net::build validates it.
// ---------------------------------------------------------------------------

struct TransitionDescription {
  std::string name;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  bool controllable = true;
};

struct PairDescription {
  std::optional<std::vector<std::string>> marking;  // exact marking
  std::optional<std::string> when;                  // state predicate pattern
  std::string transition = "*";                     // "*" matches every transition
};

struct InvariantDescription {
  std::string kind = "priorities";  // priorities | state_predicate | pairs
  std::string expr;
  std::string mode = "strict";      // strict | paper-literal
  std::vector<PairDescription> pairs;
};

struct NetDescription {
  std::vector<std::string> places;
  std::vector<TransitionDescription> transitions;
  std::vector<std::string> initial;
  std::vector<std::pair<std::string, std::vector<std::string>>> processes;
  std::vector<std::pair<std::string, std::string>> priorities;  // [lower, higher]
  std::optional<InvariantDescription> invariant;
  std::vector<std::pair<std::string, std::vector<std::string>>> supervisors;
  std::vector<std::pair<std::string, std::string>> order;  // [smaller, bigger]
};

// ---------------------------------------------------------------------------
// Validated, index-based net.
// ---------------------------------------------------------------------------

struct Transition {
  std::string name;
  PlaceSet inputs;
  PlaceSet outputs;
  bool controllable = true;
};

struct Process {
  std::string name;
  TransitionSet transitions;
};

struct Supervisor {
  std::string name;
  ProcessSet processes;
};

/// A strict partial order given by its generating pairs; lower ≪ higher for
/// priorities, smaller ≺ bigger for the process order.
using OrderPairs = std::vector<std::pair<std::size_t, std::size_t>>;

enum class PredicateMode { Strict, PaperLiteral };

struct PriorityInduced {};

struct StatePredicate {
  FormulaPtr predicate;
  PredicateMode mode = PredicateMode::Strict;
};

struct PairPattern {
  std::optional<Marking> marking;
  FormulaPtr when;                        // null = any marking
  std::optional<std::size_t> transition;  // nullopt = any transition
};

struct ExplicitPairs {
  std::vector<PairPattern> pairs;
};

using InvariantSpec = std::variant<PriorityInduced, StatePredicate, ExplicitPairs>;

/// Immutable 1-safe Petri net partitioned into processes.
class Net {
 public:
  /// Validates the description; throws Error with the offending name on
  /// unknown places/transitions/processes, duplicate names, uncovered
  /// transitions, cyclic priorities and overlapping supervisors.
  static Net build(const NetDescription& description);

  [[nodiscard]] NetDescription describe() const;

  [[nodiscard]] std::size_t place_count() const { return places_.size(); }
  [[nodiscard]] std::size_t transition_count() const { return transitions_.size(); }
  [[nodiscard]] std::size_t process_count() const { return processes_.size(); }

  [[nodiscard]] const std::vector<std::string>& places() const { return places_; }
  [[nodiscard]] const std::vector<Transition>& transitions() const { return transitions_; }
  [[nodiscard]] const std::vector<Process>& processes() const { return processes_; }
  [[nodiscard]] const Transition& transition(std::size_t t) const { return transitions_.at(t); }
  [[nodiscard]] const Process& process(std::size_t pi) const { return processes_.at(pi); }
  [[nodiscard]] const Marking& initial() const { return initial_; }
  [[nodiscard]] const OrderPairs& priorities() const { return priorities_; }
  [[nodiscard]] const InvariantSpec& invariant() const { return invariant_; }
  [[nodiscard]] bool has_invariant() const { return has_invariant_; }
  [[nodiscard]] const std::vector<Supervisor>& supervisors() const { return supervisors_; }
  [[nodiscard]] const OrderPairs& order() const { return order_; }
  [[nodiscard]] const Symbols& symbols() const { return symbols_; }

  [[nodiscard]] std::optional<std::size_t> find_place(std::string_view name) const { return symbols_.place(name); }
  [[nodiscard]] std::optional<std::size_t> find_transition(std::string_view name) const {
    return symbols_.transition(name);
  }
  [[nodiscard]] std::optional<std::size_t> find_process(std::string_view name) const {
    return symbols_.process(name);
  }

  /// Resolve names; throw UnknownPlace / UnknownTransition / UnknownProcess.
  [[nodiscard]] std::size_t place_index(std::string_view name) const;
  [[nodiscard]] std::size_t transition_index(std::string_view name) const;
  [[nodiscard]] std::size_t process_index(std::string_view name) const;
  [[nodiscard]] Marking marking(const std::vector<std::string>& names) const;
  [[nodiscard]] ProcessSet process_set(const std::vector<std::string>& names) const;

  [[nodiscard]] ProcessSet all_processes() const { return ProcessSet::first(processes_.size()); }
  [[nodiscard]] TransitionSet all_transitions() const { return TransitionSet::first(transitions_.size()); }

  /// proc(t): the processes containing t.
  [[nodiscard]] const ProcessSet& owners(std::size_t t) const { return owners_.at(t); }
  /// •t ∪ t•
  [[nodiscard]] PlaceSet adjacent(std::size_t t) const {
    return transitions_[t].inputs | transitions_[t].outputs;
  }
  /// All transitions of the given processes.
  [[nodiscard]] TransitionSet transitions_of(const ProcessSet& procs) const;
  /// ngb(Π): places adjacent to some transition of Π.
  [[nodiscard]] PlaceSet neighborhood(const ProcessSet& procs) const;
  /// own(Π) = ngb(Π) \ ngb(C \ Π).
  [[nodiscard]] PlaceSet owned(const ProcessSet& procs) const;
  /// vis(π): transitions touching ngb(π).
  [[nodiscard]] const TransitionSet& visible(std::size_t pi) const { return visible_.at(pi); }
  /// Transitions strictly above t in the transitive closure of ≪.
  [[nodiscard]] const TransitionSet& higher_priority(std::size_t t) const { return higher_.at(t); }

  [[nodiscard]] std::string format(const PlaceSet& places) const;
  [[nodiscard]] std::vector<std::string> place_names(const PlaceSet& places) const;
  [[nodiscard]] std::vector<std::string> transition_names(const TransitionSet& transitions) const;
  [[nodiscard]] std::vector<std::string> process_names(const ProcessSet& processes) const;

 private:
  Net() = default;

  std::vector<std::string> places_;
  std::vector<Transition> transitions_;
  std::vector<Process> processes_;
  Marking initial_;
  OrderPairs priorities_;
  InvariantSpec invariant_;
  bool has_invariant_ = false;
  std::optional<InvariantDescription> invariant_description_;
  std::vector<Supervisor> supervisors_;
  OrderPairs order_;
  Symbols symbols_;

  std::vector<ProcessSet> owners_;
  std::vector<PlaceSet> process_neighborhood_;
  std::vector<TransitionSet> visible_;
  std::vector<TransitionSet> higher_;
};

/// Transitive closure of an order over n elements: row i holds every j with
/// i < j. Returns nullopt when the closure has a cycle (or is reflexive).
std::optional<std::vector<std::vector<bool>>> transitive_closure(std::size_t n, const OrderPairs& pairs);

}  // namespace knowctl
