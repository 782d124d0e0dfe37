#include "knowctl/game.hpp"

#include <algorithm>

namespace knowctl {

bool SafeControl::allows(const Marking& s, std::size_t t) const {
  auto it = safe.find(s);
  return it != safe.end() && it->second.test(t);
}

TransitionSet SafeControl::safe_set(const Marking& s) const {
  auto it = safe.find(s);
  return it == safe.end() ? TransitionSet{} : it->second;
}

std::size_t SafeControl::safe_size() const {
  std::size_t n = 0;
  for (const auto& [_, ts] : safe) n += ts.count();
  return n;
}

std::vector<SafePair> SafeControl::safe_pairs() const {
  std::vector<SafePair> out;
  for (const auto& s : sorted(good))
    safe_set(s).for_each([&](std::size_t t) { out.emplace_back(s, t); });
  return out;
}

MarkingSet SafeControl::attractor_level(std::size_t k) const {
  MarkingSet out;
  for (const auto& [s, r] : rank)
    if (r <= k) out.insert(s);
  return out;
}

namespace {

enum class Clause { None, Member, Uncontrollable, AllMoves };

// Which attr clause (if any) puts state i into attr(A).
template <typename InA>
Clause clause_for(const Net& net, const InvariantRelation& inv, const Lts& lts, std::size_t i, InA in_a) {
  if (in_a(i)) return Clause::Member;
  const Marking& s = lts.state(i);
  for (std::uint32_t e : lts.outgoing(i)) {
    const Edge& edge = lts.edges()[e];
    if (net.transition(edge.transition).controllable) continue;
    if (!inv.allows(s, edge.transition) || in_a(edge.target)) return Clause::Uncontrollable;
  }
  if (lts.is_deadlock(i)) return Clause::None;
  for (std::uint32_t e : lts.outgoing(i)) {
    const Edge& edge = lts.edges()[e];
    if (inv.allows(s, edge.transition) && !in_a(edge.target)) return Clause::None;
  }
  return Clause::AllMoves;
}

SpoilerStrategy build_strategy(const Net& net, const InvariantRelation& inv, const Lts& lts,
                               const std::vector<std::size_t>& rank_of) {
  constexpr std::size_t kOut = static_cast<std::size_t>(-1);
  SpoilerStrategy strategy;
  std::unordered_map<std::size_t, std::size_t> node_of;
  std::vector<std::size_t> todo{0};
  node_of[0] = 0;
  strategy.nodes.push_back({lts.state(0), rank_of[0], StrategyNode::Owner::Spoiler, {}});

  auto node_for = [&](std::size_t state) {
    auto [it, inserted] = node_of.try_emplace(state, strategy.nodes.size());
    if (inserted) {
      strategy.nodes.push_back({lts.state(state), rank_of[state], StrategyNode::Owner::Spoiler, {}});
      todo.push_back(state);
    }
    return it->second;
  };

  while (!todo.empty()) {
    const std::size_t i = todo.back();
    todo.pop_back();
    const std::size_t node = node_of[i];
    const std::size_t r = rank_of[i];
    const Marking s = lts.state(i);
    auto below = [&](std::size_t j) { return rank_of[j] != kOut && rank_of[j] < r; };

    std::vector<StrategyNode::Branch> branches;
    StrategyNode::Owner owner = StrategyNode::Owner::Constructor;
    for (std::uint32_t e : lts.outgoing(i)) {
      const Edge& edge = lts.edges()[e];
      if (net.transition(edge.transition).controllable) continue;
      if (!inv.allows(s, edge.transition)) {
        branches = {{edge.transition, true, std::nullopt}};
        owner = StrategyNode::Owner::Spoiler;
        break;
      }
      if (below(edge.target) && owner != StrategyNode::Owner::Spoiler) {
        branches = {{edge.transition, false, node_for(edge.target)}};
        owner = StrategyNode::Owner::Spoiler;
      }
    }
    if (owner == StrategyNode::Owner::Constructor) {
      for (std::uint32_t e : lts.outgoing(i)) {
        const Edge& edge = lts.edges()[e];
        if (!inv.allows(s, edge.transition))
          branches.push_back({edge.transition, true, std::nullopt});
        else
          branches.push_back({edge.transition, false, node_for(edge.target)});
      }
    }
    strategy.nodes[node].owner = owner;
    strategy.nodes[node].branches = std::move(branches);
  }
  return strategy;
}

}  // namespace

MarkingSet attractor_step(const Net& net, const InvariantRelation& inv, const Lts& lts, const MarkingSet& a) {
  MarkingSet out = a;
  auto in_a = [&](std::size_t j) { return a.count(lts.state(j)) != 0; };
  for (std::size_t i = 0; i < lts.size(); ++i)
    if (clause_for(net, inv, lts, i, in_a) != Clause::None) out.insert(lts.state(i));
  return out;
}

SafeControl solve(const Net& net, const InvariantRelation& inv, const Lts& lts, const ExplorationLimits& limits) {
  constexpr std::size_t kOut = static_cast<std::size_t>(-1);
  SafeControl sc;
  std::vector<std::size_t> rank_of(lts.size(), kOut);
  auto in_a = [&](std::size_t j) { return rank_of[j] != kOut; };

  // Level-synchronous backwards fixpoint: only predecessors of the last
  // level can join the next one.
  std::vector<std::size_t> frontier;
  for (std::size_t i = 0; i < lts.size(); ++i)
    if (clause_for(net, inv, lts, i, in_a) != Clause::None) frontier.push_back(i);
  std::size_t level = 0;
  while (!frontier.empty()) {
    ++level;
    for (std::size_t i : frontier) rank_of[i] = level;
    std::vector<std::size_t> next;
    std::vector<bool> queued(lts.size(), false);
    for (std::size_t j : frontier)
      for (std::uint32_t e : lts.incoming(j)) {
        const std::size_t p = lts.edges()[e].source;
        if (in_a(p) || queued[p]) continue;
        queued[p] = true;
        if (clause_for(net, inv, lts, p, in_a) != Clause::None) next.push_back(p);
      }
    std::sort(next.begin(), next.end());
    frontier = std::move(next);
  }
  sc.iterations = level;

  for (std::size_t i = 0; i < lts.size(); ++i)
    if (in_a(i)) {
      sc.attractor.insert(lts.state(i));
      sc.rank.emplace(lts.state(i), rank_of[i]);
    }

  if (lts.size() > 0 && in_a(0)) {
    sc.winnable = false;
    sc.spoiler = build_strategy(net, inv, lts, rank_of);
    return sc;
  }

  const MarkingSet* attr = &sc.attractor;
  InvariantRelation inv_g(net, [&inv, &net, attr](const Marking& s, std::size_t t) {
    return inv.allows(s, t) && attr->count(fire(net, s, t)) == 0;
  });
  sc.graph = restricted_reach(net, inv_g, limits);
  sc.winnable = true;
  for (const Marking& s : sc.graph.states()) {
    sc.good.insert(s);
    sc.safe.emplace(s, TransitionSet{});
  }
  for (const Edge& e : sc.graph.edges()) sc.safe[sc.graph.state(e.source)].set(e.transition);
  return sc;
}

SafeControl solve(const Net& net, const InvariantRelation& inv, const ExplorationLimits& limits) {
  return solve(net, inv, reach_graph(net, limits), limits);
}

}  // namespace knowctl
