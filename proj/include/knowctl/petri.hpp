#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "knowctl/bitset.hpp"
#include "knowctl/net.hpp"

namespace knowctl {

// ----------------------------------------------------------------------------
// Token game
// ----------------------------------------------------------------------------

/// •t ⊆ s and t• ∩ s ⊆ •t (the contact condition keeps the net 1-safe).
[[nodiscard]] bool is_enabled(const Net& net, const Marking& s, std::size_t t);
[[nodiscard]] TransitionSet enabled_set(const Net& net, const Marking& s);
[[nodiscard]] inline bool is_deadlock(const Net& net, const Marking& s) { return enabled_set(net, s).empty(); }

/// (s \ •t) ∪ t•. Throws NotEnabled.
[[nodiscard]] Marking fire(const Net& net, const Marking& s, std::size_t t);

/// (•t1 ∪ t1•) ∩ (•t2 ∪ t2•) ≠ ∅
[[nodiscard]] bool dependent(const Net& net, std::size_t t1, std::size_t t2);

// ----------------------------------------------------------------------------
// Observation
// ----------------------------------------------------------------------------

/// Weak observes local information (the neighborhood); Strong observes the
/// local state (the owned places).
enum class ObservationMode { Weak, Strong };

/// ngb(Π) or own(Π). Throws UnknownProcess for an empty or out-of-range set.
[[nodiscard]] PlaceSet observation_places(const Net& net, const ProcessSet& procs, ObservationMode mode);
/// s ∩ observation_places(procs, mode)
[[nodiscard]] PlaceSet local_view(const Net& net, const Marking& s, const ProcessSet& procs, ObservationMode mode);

// ----------------------------------------------------------------------------
// Generalized invariant I ⊆ S × T
// ----------------------------------------------------------------------------

/// Membership test for the generalized invariant. Only enabled pairs are ever
/// allowed, so R ⊆ I ⊆ enabled pairs holds by construction.
class InvariantRelation {
 public:
  using Predicate = std::function<bool(const Marking&, std::size_t)>;

  InvariantRelation(const Net& net, Predicate predicate) : net_(&net), predicate_(std::move(predicate)) {}

  /// Every enabled pair.
  static InvariantRelation all_enabled(const Net& net);

  [[nodiscard]] bool allows(const Marking& s, std::size_t t) const {
    return is_enabled(*net_, s, t) && predicate_(s, t);
  }
  [[nodiscard]] TransitionSet allowed_set(const Marking& s) const;

 private:
  const Net* net_;
  Predicate predicate_;
};

/// Evaluates a formula built only from places, constants and connectives.
[[nodiscard]] bool evaluate_state_predicate(const Formula& f, const Marking& s);

/// Throws MalformedPredicate when a predicate uses anything but places.
[[nodiscard]] InvariantRelation compile_invariant(const Net& net, const InvariantSpec& spec);
/// The net's own invariant (priority-induced when none is declared).
[[nodiscard]] InvariantRelation compile_invariant(const Net& net);

// ----------------------------------------------------------------------------
// State graphs
// ----------------------------------------------------------------------------

struct ExplorationLimits {
  std::size_t max_states = std::size_t{1} << 24;
};

struct Edge {
  std::uint32_t source;
  std::uint32_t transition;
  std::uint32_t target;
};

/// Explicit reachability graph. State 0 is the initial marking; states are
/// stored in breadth-first discovery order.
class Lts {
 public:
  [[nodiscard]] std::size_t size() const { return states_.size(); }
  [[nodiscard]] const std::vector<Marking>& states() const { return states_; }
  [[nodiscard]] const Marking& state(std::size_t i) const { return states_.at(i); }
  [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
  [[nodiscard]] const std::vector<std::uint32_t>& outgoing(std::size_t i) const { return out_.at(i); }
  [[nodiscard]] const std::vector<std::uint32_t>& incoming(std::size_t i) const { return in_.at(i); }
  [[nodiscard]] std::optional<std::uint32_t> find(const Marking& m) const;
  [[nodiscard]] bool contains(const Marking& m) const { return find(m).has_value(); }
  [[nodiscard]] bool has_edge(const Marking& s, std::size_t t) const;
  /// Markings with no enabled transition in the net (independent of any
  /// restriction that produced this graph).
  [[nodiscard]] const std::vector<Marking>& deadlocks() const { return deadlocks_; }
  [[nodiscard]] bool is_deadlock(std::size_t i) const { return deadlock_flags_.at(i); }
  /// States in canonical order.
  [[nodiscard]] std::vector<Marking> sorted_states() const;

 private:
  friend Lts explore(const Net&, const InvariantRelation*, const ExplorationLimits&);

  std::vector<Marking> states_;
  std::unordered_map<Marking, std::uint32_t> index_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::uint32_t>> out_;
  std::vector<std::vector<std::uint32_t>> in_;
  std::vector<Marking> deadlocks_;
  std::vector<bool> deadlock_flags_;
};

/// Closure from s0; with a relation, only allowed pairs are fired.
/// Throws StateExplosion when the cap is exceeded.
Lts explore(const Net& net, const InvariantRelation* inv, const ExplorationLimits& limits);

inline Lts reach_graph(const Net& net, const ExplorationLimits& limits = {}) {
  return explore(net, nullptr, limits);
}
inline Lts restricted_reach(const Net& net, const InvariantRelation& inv, const ExplorationLimits& limits = {}) {
  return explore(net, &inv, limits);
}

struct Execution {
  std::vector<std::size_t> transitions;
  bool truncated = false;  // hit the step bound
  bool lasso = false;      // stopped at a marking already on the path
};

/// All maximal transition sequences from s0 up to `bound` steps, in
/// canonical (lexicographic by transition index) order.
std::vector<Execution> enumerate_executions(const Net& net, const InvariantRelation* inv, std::size_t bound);

std::vector<Marking> sorted(const std::unordered_set<Marking>& markings);

}  // namespace knowctl
