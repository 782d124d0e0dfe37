#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "knowctl/formula.hpp"
#include "knowctl/game.hpp"
#include "knowctl/petri.hpp"

namespace knowctl {

/// The marking set knowledge is computed over, in canonical order.
class Universe {
 public:
  Universe(const Net& net, std::vector<Marking> states);

  /// G of a solved game (the default).
  static Universe over_good(const Net& net, const SafeControl& safe);
  /// Every reachable marking.
  static Universe over_reach(const Net& net, const Lts& lts);

  [[nodiscard]] const Net& net() const { return *net_; }
  [[nodiscard]] std::size_t size() const { return states_.size(); }
  [[nodiscard]] const std::vector<Marking>& states() const { return states_; }
  [[nodiscard]] const Marking& state(std::size_t i) const { return states_.at(i); }
  [[nodiscard]] std::optional<std::size_t> find(const Marking& s) const;
  [[nodiscard]] bool contains(const Marking& s) const { return find(s).has_value(); }
  /// Throws StateNotInUniverse.
  [[nodiscard]] std::size_t index_of(const Marking& s) const;

 private:
  const Net* net_;
  std::vector<Marking> states_;
  std::unordered_map<Marking, std::size_t> index_;
};

/// Partition of a universe by local view for one (process set, mode).
struct ClassIndex {
  PlaceSet observed;
  std::vector<PlaceSet> view_of;                                 // per universe state
  std::unordered_map<PlaceSet, std::vector<std::uint32_t>> cells;  // view → members (ascending)

  [[nodiscard]] const std::vector<std::uint32_t>& cell_of(std::size_t i) const { return cells.at(view_of[i]); }
};

/// Per-process subset construction over the universe: states are sets Γ of
/// markings the net may be in after a given observable history of π.
struct PastAutomaton {
  struct Transition {
    std::uint32_t from;
    std::uint32_t transition;
    std::uint32_t to;
  };

  std::size_t process = 0;
  std::vector<std::vector<std::uint32_t>> states;  // universe indices, ascending
  std::uint32_t initial = 0;
  std::vector<Transition> edges;

  [[nodiscard]] std::optional<std::uint32_t> step(std::uint32_t from, std::size_t t) const;
  /// Automaton states whose Γ contains universe state i.
  [[nodiscard]] std::vector<std::uint32_t> containing(std::size_t i) const;
};

struct PastLimits {
  std::size_t max_states = std::size_t{1} << 20;
};

enum class KappaFlavor { Simplified, Full };

/// Evaluates state formulas and knowledge over a universe. Labels for
/// nested modalities are computed innermost-first; class indices are cached.
class KnowledgeEvaluator {
 public:
  /// `edges` supplies the transitions the past automata follow (usually the
  /// R-restricted graph of the solved game).
  KnowledgeEvaluator(const Universe& universe, const SafeControl& safe, const Lts& edges, PastLimits limits = {});

  [[nodiscard]] const Universe& universe() const { return *universe_; }
  [[nodiscard]] const SafeControl& safe() const { return *safe_; }
  [[nodiscard]] const Net& net() const { return universe_->net(); }

  [[nodiscard]] const ClassIndex& classes(const ProcessSet& procs, ObservationMode mode) const;
  /// Members of the universe sharing s's view. Throws StateNotInUniverse.
  [[nodiscard]] std::vector<Marking> equivalence_class(const Marking& s, const ProcessSet& procs,
                                                       ObservationMode mode) const;

  /// One truth value per universe state. Throws MalformedFormula on Kp.
  [[nodiscard]] std::vector<bool> labels(const Formula& f) const;
  /// f at s (s must be in the universe). Kp is evaluated over every reachable
  /// Γ containing s.
  [[nodiscard]] bool holds(const Formula& f, const Marking& s) const;
  /// f at the marking reached by `history` from s0; Kp uses the Γ of that history.
  [[nodiscard]] bool holds_after(const Formula& f, const std::vector<std::size_t>& history) const;
  /// K^mode_procs φ at s.
  [[nodiscard]] bool knows(const Marking& s, const ProcessSet& procs, ObservationMode mode, const Formula& phi) const;
  /// Same answer, re-deriving each class by scanning the universe.
  [[nodiscard]] bool knows_low_memory(const Marking& s, const ProcessSet& procs, ObservationMode mode,
                                      const Formula& phi) const;
  [[nodiscard]] bool holds_low_memory(const Formula& f, const Marking& s) const;

  /// {t | K^mode_procs good(t)} at s: the intersection of R over the class.
  [[nodiscard]] TransitionSet known_good(const Marking& s, const ProcessSet& procs, ObservationMode mode) const;

  [[nodiscard]] const PastAutomaton& past_automaton(std::size_t process) const;
  /// φ on every member of Γ. Throws MalformedFormula on Kp.
  [[nodiscard]] bool knows_past(const PastAutomaton& pa, std::uint32_t gamma, const Formula& phi) const;
  /// {t | K^p_π good(t)} at Γ.
  [[nodiscard]] TransitionSet past_known_good(const PastAutomaton& pa, std::uint32_t gamma) const;

  /// κ^π at Γ (full flavor): some own transition is past-known good, or π
  /// past-knows that some other process locally knows a good transition.
  [[nodiscard]] bool past_kappa(const PastAutomaton& pa, std::uint32_t gamma) const;
  /// κ^π at s. Full flavor holds iff κ^π holds at every reachable Γ ∋ s.
  [[nodiscard]] bool hang_condition(std::size_t process, const Marking& s, KappaFlavor flavor) const;
  /// κ^Π = ∨_{t∈∪Π} K^s_Π good(t).
  [[nodiscard]] bool joint_kappa(const ProcessSet& procs, const Marking& s) const;

 private:
  [[nodiscard]] bool atom(const Formula& f, const Marking& s) const;
  [[nodiscard]] bool eval_low_memory(const Formula& f, const Marking& s) const;
  [[nodiscard]] bool eval_with_past(const Formula& f, std::size_t i,
                                    const std::function<bool(const Formula&)>& past) const;

  const Universe* universe_;
  const SafeControl* safe_;
  const Lts* edges_;
  PastLimits limits_;

  mutable std::mutex mutex_;
  mutable std::map<std::pair<std::uint64_t, int>, std::unique_ptr<ClassIndex>> class_cache_;
  mutable std::map<std::size_t, std::unique_ptr<PastAutomaton>> past_cache_;
};

/// Builds A_π. Throws StateExplosion when the number of Γ exceeds the cap.
[[nodiscard]] PastAutomaton build_past_automaton(const Net& net, const Universe& u, const Lts& edges,
                                                 std::size_t process, const PastLimits& limits = {});

}  // namespace knowctl
