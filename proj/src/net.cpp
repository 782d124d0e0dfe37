#include "knowctl/net.hpp"

#include <set>

#include "knowctl/error.hpp"

namespace knowctl {

namespace {

void check_unique(const std::vector<std::string>& names, const char* what) {
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (n.empty()) throw Error(ErrorKind::Syntax, std::string("empty ") + what + " name");
    if (!seen.insert(n).second)
      throw Error(ErrorKind::DuplicateName, std::string("duplicate ") + what + " name '" + n + "'");
  }
}

}  // namespace

std::optional<std::vector<std::vector<bool>>> transitive_closure(std::size_t n, const OrderPairs& pairs) {
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (auto [lo, hi] : pairs) reach[lo][hi] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = true;
  for (std::size_t i = 0; i < n; ++i)
    if (reach[i][i]) return std::nullopt;
  return reach;
}

Net Net::build(const NetDescription& d) {
  Net net;
  if (d.places.size() > kMaxPlaces)
    throw Error(ErrorKind::CapacityExceeded, "at most " + std::to_string(kMaxPlaces) + " places are supported");
  if (d.transitions.size() > kMaxTransitions)
    throw Error(ErrorKind::CapacityExceeded,
                "at most " + std::to_string(kMaxTransitions) + " transitions are supported");
  if (d.processes.size() > kMaxProcesses)
    throw Error(ErrorKind::CapacityExceeded,
                "at most " + std::to_string(kMaxProcesses) + " processes are supported");

  check_unique(d.places, "place");
  net.places_ = d.places;
  net.symbols_.places = d.places;

  std::vector<std::string> tnames;
  for (const auto& t : d.transitions) tnames.push_back(t.name);
  check_unique(tnames, "transition");
  net.symbols_.transitions = tnames;

  std::vector<std::string> pnames;
  for (const auto& [name, _] : d.processes) pnames.push_back(name);
  check_unique(pnames, "process");
  net.symbols_.processes = pnames;

  auto resolve_places = [&](const std::vector<std::string>& names, const std::string& context) {
    PlaceSet out;
    for (const auto& n : names) {
      auto p = net.symbols_.place(n);
      if (!p) throw Error(ErrorKind::UnknownPlace, context + " references undeclared place '" + n + "'");
      out.set(*p);
    }
    return out;
  };

  for (const auto& t : d.transitions) {
    Transition tr;
    tr.name = t.name;
    tr.inputs = resolve_places(t.inputs, "transition '" + t.name + "'");
    tr.outputs = resolve_places(t.outputs, "transition '" + t.name + "'");
    tr.controllable = t.controllable;
    net.transitions_.push_back(std::move(tr));
  }
  net.initial_ = resolve_places(d.initial, "initial marking");

  net.owners_.assign(net.transitions_.size(), ProcessSet{});
  for (std::size_t pi = 0; pi < d.processes.size(); ++pi) {
    const auto& [name, members] = d.processes[pi];
    Process proc{name, {}};
    for (const auto& tn : members) {
      auto t = net.symbols_.transition(tn);
      if (!t) throw Error(ErrorKind::UnknownTransition, "process '" + name + "' references undeclared transition '" + tn + "'");
      proc.transitions.set(*t);
      net.owners_[*t].set(pi);
    }
    net.processes_.push_back(std::move(proc));
  }
  for (std::size_t t = 0; t < net.transitions_.size(); ++t)
    if (net.owners_[t].empty())
      throw Error(ErrorKind::UncoveredTransition,
                  "transition '" + net.transitions_[t].name + "' belongs to no process");

  for (const auto& [lo, hi] : d.priorities) {
    auto a = net.symbols_.transition(lo);
    auto b = net.symbols_.transition(hi);
    if (!a) throw Error(ErrorKind::UnknownTransition, "priority references undeclared transition '" + lo + "'");
    if (!b) throw Error(ErrorKind::UnknownTransition, "priority references undeclared transition '" + hi + "'");
    net.priorities_.emplace_back(*a, *b);
  }
  auto closure = transitive_closure(net.transitions_.size(), net.priorities_);
  if (!closure) throw Error(ErrorKind::CyclicPriority, "priority relation is cyclic or reflexive");
  net.higher_.assign(net.transitions_.size(), TransitionSet{});
  for (std::size_t i = 0; i < net.transitions_.size(); ++i)
    for (std::size_t j = 0; j < net.transitions_.size(); ++j)
      if ((*closure)[i][j]) net.higher_[i].set(j);

  net.process_neighborhood_.clear();
  for (const auto& proc : net.processes_) {
    PlaceSet ngb;
    proc.transitions.for_each([&](std::size_t t) { ngb |= net.adjacent(t); });
    net.process_neighborhood_.push_back(ngb);
  }
  for (std::size_t pi = 0; pi < net.processes_.size(); ++pi) {
    TransitionSet vis;
    for (std::size_t t = 0; t < net.transitions_.size(); ++t)
      if (net.adjacent(t).intersects(net.process_neighborhood_[pi])) vis.set(t);
    net.visible_.push_back(vis);
  }

  if (d.invariant) {
    const auto& inv = *d.invariant;
    net.has_invariant_ = true;
    net.invariant_description_ = inv;
    if (inv.kind == "priorities") {
      net.invariant_ = PriorityInduced{};
    } else if (inv.kind == "state_predicate") {
      StatePredicate sp;
      try {
        sp.predicate = parse_formula(inv.expr, net.symbols_);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::UnknownPlace) throw;
        throw Error(ErrorKind::MalformedPredicate, std::string("invariant predicate: ") + e.what());
      }
      if (!is_state_predicate(*sp.predicate))
        throw Error(ErrorKind::MalformedPredicate,
                    "invariant predicate may only use places, constants and boolean connectives");
      if (inv.mode == "strict")
        sp.mode = PredicateMode::Strict;
      else if (inv.mode == "paper-literal")
        sp.mode = PredicateMode::PaperLiteral;
      else
        throw Error(ErrorKind::MalformedPredicate, "unknown predicate mode '" + inv.mode + "'");
      net.invariant_ = std::move(sp);
    } else if (inv.kind == "pairs") {
      ExplicitPairs ep;
      for (const auto& pd : inv.pairs) {
        PairPattern pattern;
        if (pd.marking) pattern.marking = resolve_places(*pd.marking, "invariant pair");
        if (pd.when) {
          try {
            pattern.when = parse_formula(*pd.when, net.symbols_);
          } catch (const Error& e) {
            if (e.kind() == ErrorKind::UnknownPlace) throw;
            throw Error(ErrorKind::MalformedPredicate, std::string("invariant pair pattern: ") + e.what());
          }
          if (!is_state_predicate(*pattern.when))
            throw Error(ErrorKind::MalformedPredicate, "invariant pair pattern must be a state predicate");
        }
        if (pd.transition != "*") {
          auto t = net.symbols_.transition(pd.transition);
          if (!t)
            throw Error(ErrorKind::UnknownTransition,
                        "invariant pair references undeclared transition '" + pd.transition + "'");
          pattern.transition = *t;
        }
        ep.pairs.push_back(std::move(pattern));
      }
      net.invariant_ = std::move(ep);
    } else {
      throw Error(ErrorKind::Syntax, "unknown invariant kind '" + inv.kind + "'");
    }
  }

  ProcessSet supervised;
  for (const auto& [name, members] : d.supervisors) {
    Supervisor sup{name, {}};
    for (const auto& pn : members) {
      auto pi = net.symbols_.process(pn);
      if (!pi) throw Error(ErrorKind::UnknownProcess, "supervisor '" + name + "' references undeclared process '" + pn + "'");
      if (supervised.test(*pi))
        throw Error(ErrorKind::OverlappingSupervisors,
                    "process '" + pn + "' is assigned to more than one supervisor");
      supervised.set(*pi);
      sup.processes.set(*pi);
    }
    net.supervisors_.push_back(std::move(sup));
  }
  std::vector<std::string> snames;
  for (const auto& s : net.supervisors_) snames.push_back(s.name);
  check_unique(snames, "supervisor");

  for (const auto& [small, big] : d.order) {
    auto a = net.symbols_.process(small);
    auto b = net.symbols_.process(big);
    if (!a) throw Error(ErrorKind::UnknownProcess, "order references undeclared process '" + small + "'");
    if (!b) throw Error(ErrorKind::UnknownProcess, "order references undeclared process '" + big + "'");
    net.order_.emplace_back(*a, *b);
  }
  if (!transitive_closure(net.processes_.size(), net.order_))
    throw Error(ErrorKind::InvalidOrder, "process order is cyclic or reflexive");

  return net;
}

NetDescription Net::describe() const {
  NetDescription d;
  d.places = places_;
  for (const auto& t : transitions_)
    d.transitions.push_back({t.name, place_names(t.inputs), place_names(t.outputs), t.controllable});
  d.initial = place_names(initial_);
  for (const auto& p : processes_) d.processes.emplace_back(p.name, transition_names(p.transitions));
  for (auto [lo, hi] : priorities_) d.priorities.emplace_back(transitions_[lo].name, transitions_[hi].name);
  d.invariant = invariant_description_;
  for (const auto& s : supervisors_) d.supervisors.emplace_back(s.name, process_names(s.processes));
  for (auto [a, b] : order_) d.order.emplace_back(processes_[a].name, processes_[b].name);
  return d;
}

std::size_t Net::place_index(std::string_view name) const {
  if (auto p = find_place(name)) return *p;
  throw Error(ErrorKind::UnknownPlace, "unknown place '" + std::string(name) + "'");
}

std::size_t Net::transition_index(std::string_view name) const {
  if (auto t = find_transition(name)) return *t;
  throw Error(ErrorKind::UnknownTransition, "unknown transition '" + std::string(name) + "'");
}

std::size_t Net::process_index(std::string_view name) const {
  if (auto p = find_process(name)) return *p;
  throw Error(ErrorKind::UnknownProcess, "unknown process '" + std::string(name) + "'");
}

Marking Net::marking(const std::vector<std::string>& names) const {
  Marking m;
  for (const auto& n : names) m.set(place_index(n));
  return m;
}

ProcessSet Net::process_set(const std::vector<std::string>& names) const {
  ProcessSet s;
  for (const auto& n : names) s.set(process_index(n));
  return s;
}

TransitionSet Net::transitions_of(const ProcessSet& procs) const {
  TransitionSet out;
  procs.for_each([&](std::size_t pi) { out |= processes_.at(pi).transitions; });
  return out;
}

PlaceSet Net::neighborhood(const ProcessSet& procs) const {
  PlaceSet out;
  procs.for_each([&](std::size_t pi) { out |= process_neighborhood_.at(pi); });
  return out;
}

PlaceSet Net::owned(const ProcessSet& procs) const {
  return neighborhood(procs) - neighborhood(all_processes() - procs);
}

std::string Net::format(const PlaceSet& places) const {
  std::string out = "{";
  bool first = true;
  places.for_each([&](std::size_t p) {
    if (!first) out += ',';
    first = false;
    out += places_.at(p);
  });
  return out + "}";
}

std::vector<std::string> Net::place_names(const PlaceSet& places) const {
  std::vector<std::string> out;
  places.for_each([&](std::size_t p) { out.push_back(places_.at(p)); });
  return out;
}

std::vector<std::string> Net::transition_names(const TransitionSet& transitions) const {
  std::vector<std::string> out;
  transitions.for_each([&](std::size_t t) { out.push_back(transitions_.at(t).name); });
  return out;
}

std::vector<std::string> Net::process_names(const ProcessSet& processes) const {
  std::vector<std::string> out;
  processes.for_each([&](std::size_t p) { out.push_back(processes_.at(p).name); });
  return out;
}

}  // namespace knowctl
