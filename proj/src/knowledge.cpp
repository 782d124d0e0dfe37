#include "knowctl/knowledge.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

#include "knowctl/error.hpp"

namespace knowctl {

Universe::Universe(const Net& net, std::vector<Marking> states) : net_(&net), states_(std::move(states)) {
  std::sort(states_.begin(), states_.end(), CanonicalLess{});
  states_.erase(std::unique(states_.begin(), states_.end()), states_.end());
  for (std::size_t i = 0; i < states_.size(); ++i) index_.emplace(states_[i], i);
}

Universe Universe::over_good(const Net& net, const SafeControl& safe) {
  return Universe(net, std::vector<Marking>(safe.good.begin(), safe.good.end()));
}

Universe Universe::over_reach(const Net& net, const Lts& lts) { return Universe(net, lts.states()); }

std::optional<std::size_t> Universe::find(const Marking& s) const {
  auto it = index_.find(s);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Universe::index_of(const Marking& s) const {
  if (auto i = find(s)) return *i;
  throw Error(ErrorKind::StateNotInUniverse, "marking " + net_->format(s) + " is not in the universe");
}

// ----------------------------------------------------------------------------

std::optional<std::uint32_t> PastAutomaton::step(std::uint32_t from, std::size_t t) const {
  for (const auto& e : edges)
    if (e.from == from && e.transition == t) return e.to;
  return std::nullopt;
}

std::vector<std::uint32_t> PastAutomaton::containing(std::size_t i) const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t g = 0; g < states.size(); ++g)
    if (std::binary_search(states[g].begin(), states[g].end(), static_cast<std::uint32_t>(i))) out.push_back(g);
  return out;
}

PastAutomaton build_past_automaton(const Net& net, const Universe& u, const Lts& edges, std::size_t process,
                                   const PastLimits& limits) {
  if (process >= net.process_count())
    throw Error(ErrorKind::UnknownProcess, "process index " + std::to_string(process) + " out of range");
  const TransitionSet& vis = net.visible(process);
  const PlaceSet ngb = net.neighborhood(ProcessSet::of({process}));

  // Universe-internal successor lists.
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> succ(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    auto li = edges.find(u.state(i));
    if (!li) continue;
    for (std::uint32_t e : edges.outgoing(*li)) {
      const Edge& edge = edges.edges()[e];
      if (auto j = u.find(edges.state(edge.target)))
        succ[i].emplace_back(edge.transition, static_cast<std::uint32_t>(*j));
    }
  }

  auto close = [&](std::vector<std::uint32_t> seed) {
    std::vector<bool> in(u.size(), false);
    std::deque<std::uint32_t> work;
    for (auto i : seed)
      if (!in[i]) {
        in[i] = true;
        work.push_back(i);
      }
    while (!work.empty()) {
      const auto i = work.front();
      work.pop_front();
      for (auto [t, j] : succ[i])
        if (!vis.test(t) && !in[j]) {
          in[j] = true;
          work.push_back(j);
        }
    }
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < u.size(); ++i)
      if (in[i]) out.push_back(i);
    return out;
  };

  PastAutomaton pa;
  pa.process = process;
  std::map<std::vector<std::uint32_t>, std::uint32_t> ids;
  std::deque<std::uint32_t> work;
  auto intern = [&](std::vector<std::uint32_t> gamma) {
    auto [it, inserted] = ids.try_emplace(gamma, static_cast<std::uint32_t>(pa.states.size()));
    if (inserted) {
      if (pa.states.size() >= limits.max_states)
        throw Error(ErrorKind::StateExplosion, "past automaton exceeds the cap of " +
                                                   std::to_string(limits.max_states) + " states");
      const PlaceSet view = u.state(gamma.front()) & ngb;
      for (auto i : gamma)
        if ((u.state(i) & ngb) != view)
          throw std::logic_error("past automaton state mixes local information");
      pa.states.push_back(std::move(gamma));
      work.push_back(it->second);
    }
    return it->second;
  };

  auto s0 = u.find(net.initial());
  if (!s0) return pa;
  pa.initial = intern(close({static_cast<std::uint32_t>(*s0)}));
  while (!work.empty()) {
    const std::uint32_t g = work.front();
    work.pop_front();
    vis.for_each([&](std::size_t t) {
      std::vector<std::uint32_t> seed;
      for (auto i : pa.states[g])
        for (auto [tt, j] : succ[i])
          if (tt == t) seed.push_back(j);
      if (seed.empty()) return;
      const std::uint32_t to = intern(close(std::move(seed)));
      pa.edges.push_back({g, static_cast<std::uint32_t>(t), to});
    });
  }
  return pa;
}

// ----------------------------------------------------------------------------

KnowledgeEvaluator::KnowledgeEvaluator(const Universe& universe, const SafeControl& safe, const Lts& edges,
                                       PastLimits limits)
    : universe_(&universe), safe_(&safe), edges_(&edges), limits_(limits) {}

const ClassIndex& KnowledgeEvaluator::classes(const ProcessSet& procs, ObservationMode mode) const {
  const PlaceSet observed = observation_places(net(), procs, mode);
  std::lock_guard lock(mutex_);
  auto& slot = class_cache_[{procs.word(0), static_cast<int>(mode)}];
  if (!slot) {
    auto ci = std::make_unique<ClassIndex>();
    ci->observed = observed;
    ci->view_of.reserve(universe_->size());
    for (std::size_t i = 0; i < universe_->size(); ++i) {
      const PlaceSet view = universe_->state(i) & observed;
      ci->view_of.push_back(view);
      ci->cells[view].push_back(static_cast<std::uint32_t>(i));
    }
    slot = std::move(ci);
  }
  return *slot;
}

std::vector<Marking> KnowledgeEvaluator::equivalence_class(const Marking& s, const ProcessSet& procs,
                                                           ObservationMode mode) const {
  const std::size_t i = universe_->index_of(s);
  std::vector<Marking> out;
  for (auto j : classes(procs, mode).cell_of(i)) out.push_back(universe_->state(j));
  return out;
}

bool KnowledgeEvaluator::atom(const Formula& f, const Marking& s) const {
  switch (f.kind) {
    case FormulaKind::True: return true;
    case FormulaKind::False: return false;
    case FormulaKind::Place: return s.test(f.index);
    case FormulaKind::Enabled: return is_enabled(net(), s, f.index);
    case FormulaKind::Good: return safe_->allows(s, f.index);
    case FormulaKind::Deadfree: return !enabled_set(net(), s).empty();
    default: throw std::logic_error("not an atom");
  }
}

std::vector<bool> KnowledgeEvaluator::labels(const Formula& f) const {
  const std::size_t n = universe_->size();
  std::vector<bool> out(n);
  switch (f.kind) {
    case FormulaKind::Not: {
      auto a = labels(*f.lhs);
      for (std::size_t i = 0; i < n; ++i) out[i] = !a[i];
      return out;
    }
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies: {
      auto a = labels(*f.lhs);
      auto b = labels(*f.rhs);
      for (std::size_t i = 0; i < n; ++i)
        out[i] = f.kind == FormulaKind::And ? (a[i] && b[i]) : f.kind == FormulaKind::Or ? (a[i] || b[i]) : (!a[i] || b[i]);
      return out;
    }
    case FormulaKind::KnowWeak:
    case FormulaKind::KnowStrong: {
      auto body = labels(*f.lhs);
      const auto mode = f.kind == FormulaKind::KnowWeak ? ObservationMode::Weak : ObservationMode::Strong;
      for (const auto& [_, members] : classes(f.observers, mode).cells) {
        const bool all = std::all_of(members.begin(), members.end(), [&](std::uint32_t j) { return body[j]; });
        for (auto j : members) out[j] = all;
      }
      return out;
    }
    case FormulaKind::KnowPast:
      throw Error(ErrorKind::MalformedFormula, "past knowledge can only be evaluated as an outermost operator");
    default:
      for (std::size_t i = 0; i < n; ++i) out[i] = atom(f, universe_->state(i));
      return out;
  }
}

bool KnowledgeEvaluator::eval_with_past(const Formula& f, std::size_t i,
                                        const std::function<bool(const Formula&)>& past) const {
  switch (f.kind) {
    case FormulaKind::KnowPast: return past(f);
    case FormulaKind::Not: return !eval_with_past(*f.lhs, i, past);
    case FormulaKind::And: return eval_with_past(*f.lhs, i, past) && eval_with_past(*f.rhs, i, past);
    case FormulaKind::Or: return eval_with_past(*f.lhs, i, past) || eval_with_past(*f.rhs, i, past);
    case FormulaKind::Implies: return !eval_with_past(*f.lhs, i, past) || eval_with_past(*f.rhs, i, past);
    default: return labels(f)[i];
  }
}

bool KnowledgeEvaluator::holds(const Formula& f, const Marking& s) const {
  const std::size_t i = universe_->index_of(s);
  if (!contains_past(f)) return labels(f)[i];
  return eval_with_past(f, i, [&](const Formula& kp) {
    const PastAutomaton& pa = past_automaton(kp.observers.front());
    for (auto g : pa.containing(i))
      if (!knows_past(pa, g, *kp.lhs)) return false;
    return true;
  });
}

bool KnowledgeEvaluator::holds_after(const Formula& f, const std::vector<std::size_t>& history) const {
  Marking s = net().initial();
  for (std::size_t t : history) s = fire(net(), s, t);
  const std::size_t i = universe_->index_of(s);
  return eval_with_past(f, i, [&](const Formula& kp) {
    const std::size_t pi = kp.observers.front();
    const PastAutomaton& pa = past_automaton(pi);
    std::uint32_t g = pa.initial;
    for (std::size_t t : history) {
      if (!net().visible(pi).test(t)) continue;
      auto next = pa.step(g, t);
      if (!next)
        throw Error(ErrorKind::StateNotInUniverse,
                    "history leaves the universe at transition '" + net().transition(t).name + "'");
      g = *next;
    }
    return knows_past(pa, g, *kp.lhs);
  });
}

bool KnowledgeEvaluator::knows(const Marking& s, const ProcessSet& procs, ObservationMode mode,
                               const Formula& phi) const {
  const std::size_t i = universe_->index_of(s);
  auto body = labels(phi);
  const auto& cell = classes(procs, mode).cell_of(i);
  return std::all_of(cell.begin(), cell.end(), [&](std::uint32_t j) { return body[j]; });
}

bool KnowledgeEvaluator::eval_low_memory(const Formula& f, const Marking& s) const {
  switch (f.kind) {
    case FormulaKind::Not: return !eval_low_memory(*f.lhs, s);
    case FormulaKind::And: return eval_low_memory(*f.lhs, s) && eval_low_memory(*f.rhs, s);
    case FormulaKind::Or: return eval_low_memory(*f.lhs, s) || eval_low_memory(*f.rhs, s);
    case FormulaKind::Implies: return !eval_low_memory(*f.lhs, s) || eval_low_memory(*f.rhs, s);
    case FormulaKind::KnowWeak:
    case FormulaKind::KnowStrong: {
      const auto mode = f.kind == FormulaKind::KnowWeak ? ObservationMode::Weak : ObservationMode::Strong;
      return knows_low_memory(s, f.observers, mode, *f.lhs);
    }
    case FormulaKind::KnowPast:
      throw Error(ErrorKind::MalformedFormula, "past knowledge is not supported on the low-memory path");
    default: return atom(f, s);
  }
}

bool KnowledgeEvaluator::knows_low_memory(const Marking& s, const ProcessSet& procs, ObservationMode mode,
                                          const Formula& phi) const {
  (void)universe_->index_of(s);
  const PlaceSet observed = observation_places(net(), procs, mode);
  const PlaceSet view = s & observed;
  for (const Marking& other : universe_->states())
    if ((other & observed) == view && !eval_low_memory(phi, other)) return false;
  return true;
}

bool KnowledgeEvaluator::holds_low_memory(const Formula& f, const Marking& s) const {
  (void)universe_->index_of(s);
  return eval_low_memory(f, s);
}

TransitionSet KnowledgeEvaluator::known_good(const Marking& s, const ProcessSet& procs, ObservationMode mode) const {
  const std::size_t i = universe_->index_of(s);
  TransitionSet out = net().all_transitions();
  for (auto j : classes(procs, mode).cell_of(i)) out &= safe_->safe_set(universe_->state(j));
  return out;
}

const PastAutomaton& KnowledgeEvaluator::past_automaton(std::size_t process) const {
  {
    std::lock_guard lock(mutex_);
    auto it = past_cache_.find(process);
    if (it != past_cache_.end()) return *it->second;
  }
  auto pa = std::make_unique<PastAutomaton>(build_past_automaton(net(), *universe_, *edges_, process, limits_));
  std::lock_guard lock(mutex_);
  auto& slot = past_cache_[process];
  if (!slot) slot = std::move(pa);
  return *slot;
}

bool KnowledgeEvaluator::knows_past(const PastAutomaton& pa, std::uint32_t gamma, const Formula& phi) const {
  if (contains_past(phi)) throw Error(ErrorKind::InnerKp, "past knowledge may not be nested");
  auto body = labels(phi);
  const auto& members = pa.states.at(gamma);
  return std::all_of(members.begin(), members.end(), [&](std::uint32_t j) { return body[j]; });
}

TransitionSet KnowledgeEvaluator::past_known_good(const PastAutomaton& pa, std::uint32_t gamma) const {
  TransitionSet out = net().all_transitions();
  for (auto j : pa.states.at(gamma)) out &= safe_->safe_set(universe_->state(j));
  return out;
}

bool KnowledgeEvaluator::past_kappa(const PastAutomaton& pa, std::uint32_t gamma) const {
  const TransitionSet own = net().process(pa.process).transitions;
  if (past_known_good(pa, gamma).intersects(own)) return true;
  for (auto j : pa.states.at(gamma)) {
    const Marking& s = universe_->state(j);
    bool someone = false;
    for (std::size_t other = 0; other < net().process_count() && !someone; ++other) {
      if (other == pa.process) continue;
      const ProcessSet single = ProcessSet::of({other});
      someone = known_good(s, single, ObservationMode::Weak).intersects(net().process(other).transitions);
    }
    if (!someone) return false;
  }
  return true;
}

bool KnowledgeEvaluator::hang_condition(std::size_t process, const Marking& s, KappaFlavor flavor) const {
  if (flavor == KappaFlavor::Simplified)
    return known_good(s, ProcessSet::of({process}), ObservationMode::Weak)
        .intersects(net().process(process).transitions);
  const PastAutomaton& pa = past_automaton(process);
  for (auto g : pa.containing(universe_->index_of(s)))
    if (!past_kappa(pa, g)) return false;
  return true;
}

bool KnowledgeEvaluator::joint_kappa(const ProcessSet& procs, const Marking& s) const {
  return known_good(s, procs, ObservationMode::Strong).intersects(net().transitions_of(procs));
}

}  // namespace knowctl
