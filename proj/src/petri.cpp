#include "knowctl/petri.hpp"

#include <algorithm>
#include <deque>

#include "knowctl/error.hpp"

namespace knowctl {

bool is_enabled(const Net& net, const Marking& s, std::size_t t) {
  const Transition& tr = net.transition(t);
  return tr.inputs.subset_of(s) && (tr.outputs & s).subset_of(tr.inputs);
}

TransitionSet enabled_set(const Net& net, const Marking& s) {
  TransitionSet out;
  for (std::size_t t = 0; t < net.transition_count(); ++t)
    if (is_enabled(net, s, t)) out.set(t);
  return out;
}

Marking fire(const Net& net, const Marking& s, std::size_t t) {
  if (t >= net.transition_count())
    throw Error(ErrorKind::UnknownTransition, "transition index " + std::to_string(t) + " out of range");
  if (!is_enabled(net, s, t))
    throw Error(ErrorKind::NotEnabled,
                "transition '" + net.transition(t).name + "' is not enabled at " + net.format(s));
  const Transition& tr = net.transition(t);
  return (s - tr.inputs) | tr.outputs;
}

bool dependent(const Net& net, std::size_t t1, std::size_t t2) {
  return net.adjacent(t1).intersects(net.adjacent(t2));
}

PlaceSet observation_places(const Net& net, const ProcessSet& procs, ObservationMode mode) {
  if (procs.empty()) throw Error(ErrorKind::UnknownProcess, "empty process set");
  if (!procs.subset_of(net.all_processes()))
    throw Error(ErrorKind::UnknownProcess, "process index out of range");
  return mode == ObservationMode::Weak ? net.neighborhood(procs) : net.owned(procs);
}

PlaceSet local_view(const Net& net, const Marking& s, const ProcessSet& procs, ObservationMode mode) {
  return s & observation_places(net, procs, mode);
}

// ----------------------------------------------------------------------------

InvariantRelation InvariantRelation::all_enabled(const Net& net) {
  return InvariantRelation(net, [](const Marking&, std::size_t) { return true; });
}

TransitionSet InvariantRelation::allowed_set(const Marking& s) const {
  TransitionSet out;
  for (std::size_t t = 0; t < net_->transition_count(); ++t)
    if (allows(s, t)) out.set(t);
  return out;
}

bool evaluate_state_predicate(const Formula& f, const Marking& s) {
  switch (f.kind) {
    case FormulaKind::True: return true;
    case FormulaKind::False: return false;
    case FormulaKind::Place: return s.test(f.index);
    case FormulaKind::Not: return !evaluate_state_predicate(*f.lhs, s);
    case FormulaKind::And: return evaluate_state_predicate(*f.lhs, s) && evaluate_state_predicate(*f.rhs, s);
    case FormulaKind::Or: return evaluate_state_predicate(*f.lhs, s) || evaluate_state_predicate(*f.rhs, s);
    case FormulaKind::Implies:
      return !evaluate_state_predicate(*f.lhs, s) || evaluate_state_predicate(*f.rhs, s);
    default:
      throw Error(ErrorKind::MalformedPredicate, "state predicate may only use places and connectives");
  }
}

InvariantRelation compile_invariant(const Net& net, const InvariantSpec& spec) {
  const Net* n = &net;
  return std::visit(
      [n](const auto& kind) -> InvariantRelation {
        using Kind = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<Kind, PriorityInduced>) {
          return InvariantRelation(*n, [n](const Marking& s, std::size_t t) {
            return !n->higher_priority(t).intersects(enabled_set(*n, s));
          });
        } else if constexpr (std::is_same_v<Kind, StatePredicate>) {
          if (!kind.predicate || !is_state_predicate(*kind.predicate))
            throw Error(ErrorKind::MalformedPredicate, "state predicate may only use places and connectives");
          FormulaPtr q = kind.predicate;
          if (kind.mode == PredicateMode::PaperLiteral)
            return InvariantRelation(*n, [q](const Marking& s, std::size_t) { return evaluate_state_predicate(*q, s); });
          return InvariantRelation(*n, [n, q](const Marking& s, std::size_t t) {
            return evaluate_state_predicate(*q, s) && evaluate_state_predicate(*q, fire(*n, s, t));
          });
        } else {
          for (const auto& p : kind.pairs)
            if (p.when && !is_state_predicate(*p.when))
              throw Error(ErrorKind::MalformedPredicate, "pair pattern must be a state predicate");
          auto pairs = kind.pairs;
          return InvariantRelation(*n, [pairs](const Marking& s, std::size_t t) {
            return std::any_of(pairs.begin(), pairs.end(), [&](const PairPattern& p) {
              return (!p.marking || *p.marking == s) && (!p.when || evaluate_state_predicate(*p.when, s)) &&
                     (!p.transition || *p.transition == t);
            });
          });
        }
      },
      spec);
}

InvariantRelation compile_invariant(const Net& net) { return compile_invariant(net, net.invariant()); }

// ----------------------------------------------------------------------------

std::optional<std::uint32_t> Lts::find(const Marking& m) const {
  auto it = index_.find(m);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Lts::has_edge(const Marking& s, std::size_t t) const {
  auto i = find(s);
  if (!i) return false;
  return std::any_of(out_[*i].begin(), out_[*i].end(), [&](std::uint32_t e) { return edges_[e].transition == t; });
}

std::vector<Marking> Lts::sorted_states() const {
  std::vector<Marking> out = states_;
  std::sort(out.begin(), out.end(), CanonicalLess{});
  return out;
}

Lts explore(const Net& net, const InvariantRelation* inv, const ExplorationLimits& limits) {
  Lts lts;
  auto intern = [&](const Marking& m) -> std::uint32_t {
    auto [it, inserted] = lts.index_.try_emplace(m, static_cast<std::uint32_t>(lts.states_.size()));
    if (inserted) {
      if (lts.states_.size() >= limits.max_states)
        throw Error(ErrorKind::StateExplosion,
                    "reachable state count exceeds the cap of " + std::to_string(limits.max_states));
      lts.states_.push_back(m);
      lts.out_.emplace_back();
      lts.in_.emplace_back();
    }
    return it->second;
  };

  intern(net.initial());
  for (std::size_t i = 0; i < lts.states_.size(); ++i) {
    const Marking s = lts.states_[i];
    const TransitionSet en = enabled_set(net, s);
    const bool dead = en.empty();
    lts.deadlock_flags_.push_back(dead);
    if (dead) lts.deadlocks_.push_back(s);
    en.for_each([&](std::size_t t) {
      if (inv && !inv->allows(s, t)) return;
      const Marking next = (s - net.transition(t).inputs) | net.transition(t).outputs;
      const std::uint32_t j = intern(next);
      const auto e = static_cast<std::uint32_t>(lts.edges_.size());
      lts.edges_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(t), j});
      lts.out_[i].push_back(e);
      lts.in_[j].push_back(e);
    });
  }
  std::sort(lts.deadlocks_.begin(), lts.deadlocks_.end(), CanonicalLess{});
  return lts;
}

namespace {

void extend(const Net& net, const InvariantRelation* inv, std::size_t bound, const Marking& s,
            std::vector<std::size_t>& path, std::vector<Marking>& seen, std::vector<Execution>& out) {
  const TransitionSet moves = inv ? inv->allowed_set(s) : enabled_set(net, s);
  if (moves.empty()) {
    out.push_back({path, false, false});
    return;
  }
  if (path.size() >= bound) {
    out.push_back({path, true, false});
    return;
  }
  moves.for_each([&](std::size_t t) {
    const Marking next = fire(net, s, t);
    path.push_back(t);
    if (std::find(seen.begin(), seen.end(), next) != seen.end()) {
      out.push_back({path, false, true});
    } else {
      seen.push_back(next);
      extend(net, inv, bound, next, path, seen, out);
      seen.pop_back();
    }
    path.pop_back();
  });
}

}  // namespace

std::vector<Execution> enumerate_executions(const Net& net, const InvariantRelation* inv, std::size_t bound) {
  if (bound == 0) throw Error(ErrorKind::InvalidArgument, "execution bound must be at least 1");
  std::vector<Execution> out;
  std::vector<std::size_t> path;
  std::vector<Marking> seen{net.initial()};
  extend(net, inv, bound, net.initial(), path, seen, out);
  std::sort(out.begin(), out.end(),
            [](const Execution& a, const Execution& b) { return a.transitions < b.transitions; });
  return out;
}

std::vector<Marking> sorted(const std::unordered_set<Marking>& markings) {
  std::vector<Marking> out(markings.begin(), markings.end());
  std::sort(out.begin(), out.end(), CanonicalLess{});
  return out;
}

}  // namespace knowctl
