#pragma once

#include <cstddef>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "knowctl/petri.hpp"

namespace knowctl {

using MarkingSet = std::unordered_set<Marking>;
using SafePair = std::pair<Marking, std::size_t>;

/// Spoiler witness for an unwinnable game. Every node's state lies in the
/// attractor; children have strictly smaller rank, so every path ends in a
/// violation leaf within `rank` steps.
struct StrategyNode {
  enum class Owner { Spoiler, Constructor };
  struct Branch {
    std::size_t transition;
    bool violation;                    // (s,t) is outside the invariant
    std::optional<std::size_t> child;  // node index when not a violation
  };

  Marking state;
  std::size_t rank;
  Owner owner;  // Spoiler: one uncontrollable move; Constructor: every enabled move
  std::vector<Branch> branches;
};

struct SpoilerStrategy {
  std::vector<StrategyNode> nodes;  // nodes[0] is the initial marking
};

struct SafeControl {
  MarkingSet attractor;                              // attr*(∅)
  std::unordered_map<Marking, std::size_t> rank;     // first k with s ∈ attr^k(∅)
  std::size_t iterations = 0;                        // least n with attr^n = attr^{n+1}
  MarkingSet good;                                   // G
  std::unordered_map<Marking, TransitionSet> safe;   // R, keyed by source marking
  bool winnable = false;
  Lts graph;                                         // G with its R edges
  std::optional<SpoilerStrategy> spoiler;

  [[nodiscard]] bool is_good(const Marking& s) const { return good.count(s) != 0; }
  [[nodiscard]] bool allows(const Marking& s, std::size_t t) const;
  [[nodiscard]] TransitionSet safe_set(const Marking& s) const;
  [[nodiscard]] std::size_t safe_size() const;
  /// R in canonical order (marking, then transition index).
  [[nodiscard]] std::vector<SafePair> safe_pairs() const;
  [[nodiscard]] std::vector<Marking> good_sorted() const { return sorted(good); }
  /// attr^k(∅) reconstructed from the ranks.
  [[nodiscard]] MarkingSet attractor_level(std::size_t k) const;
};

/// One application of attr to A over the full reachability graph.
[[nodiscard]] MarkingSet attractor_step(const Net& net, const InvariantRelation& inv, const Lts& lts,
                                        const MarkingSet& a);

/// Solves the safety game. `lts` must be the unrestricted reachability graph.
[[nodiscard]] SafeControl solve(const Net& net, const InvariantRelation& inv, const Lts& lts,
                                const ExplorationLimits& limits = {});
[[nodiscard]] SafeControl solve(const Net& net, const InvariantRelation& inv, const ExplorationLimits& limits = {});

}  // namespace knowctl
