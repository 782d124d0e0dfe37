#include "knowctl/synthesis.hpp"

#include <algorithm>
#include <set>

#include "knowctl/error.hpp"
#include "knowctl/io.hpp"

namespace knowctl {

bool JointLess::operator()(const JointLocalState& a, const JointLocalState& b) const {
  if (a.procs.count() != b.procs.count()) return a.procs.count() < b.procs.count();
  if (a.procs != b.procs) return canonical_less(a.procs, b.procs);
  return canonical_less(a.view, b.view);
}

bool subsumed_by(const Net& net, const JointLocalState& e, const JointLocalState& q) {
  return e.procs.subset_of(q.procs) && (q.view & net.owned(e.procs)) == e.view;
}

std::vector<const SupportEntry*> SupportTable::matching(const Net& net, const JointLocalState& q) const {
  std::vector<const SupportEntry*> out;
  for (const auto& e : entries)
    if (subsumed_by(net, e.state, q)) out.push_back(&e);
  return out;
}

std::optional<std::uint32_t> PastTable::step(std::uint32_t from, std::size_t t) const {
  for (const auto& e : edges)
    if (e.from == from && e.transition == t) return e.to;
  return std::nullopt;
}

std::optional<std::size_t> ControllerArtifact::supervisor_of(std::size_t process) const {
  for (std::size_t i = 0; i < supervisors.size(); ++i)
    if (supervisors[i].procs.test(process)) return i;
  return std::nullopt;
}

// ----------------------------------------------------------------------------

LocalTable local_support_table(const KnowledgeEvaluator& ev, std::size_t process) {
  const ProcessSet single = ProcessSet::of({process});
  const TransitionSet own = ev.net().process(process).transitions;
  LocalTable table;
  for (const auto& [view, members] : ev.classes(single, ObservationMode::Weak).cells)
    table.emplace(view, ev.known_good(ev.universe().state(members.front()), single, ObservationMode::Weak) & own);
  return table;
}

TransitionSet supp(const KnowledgeEvaluator& ev, const JointLocalState& q) {
  const Universe& u = ev.universe();
  const Net& net = ev.net();
  TransitionSet out = net.all_transitions();
  bool realized = false;
  if (q.procs.empty()) {
    realized = q.view.empty() && u.size() > 0;
    for (const Marking& s : u.states()) out &= ev.safe().safe_set(s);
  } else {
    const auto& cells = ev.classes(q.procs, ObservationMode::Strong).cells;
    if (auto it = cells.find(q.view); it != cells.end()) {
      realized = true;
      for (auto j : it->second) out &= ev.safe().safe_set(u.state(j));
    }
  }
  if (!realized)
    throw Error(ErrorKind::UnrealizedJointState, "joint local state " + net.format(q.view) + " over {" +
                                                     [&] {
                                                       std::string s;
                                                       for (const auto& n : net.process_names(q.procs))
                                                         s += (s.empty() ? "" : ",") + n;
                                                       return s;
                                                     }() +
                                                     "} is not realized by any good state");
  return out;
}

namespace {

TransitionSet support_scope(const Net& net, const JointLocalState& q, const ProcessSet& scope) {
  return net.transitions_of(q.procs.count() == 1 ? q.procs : scope);
}

bool effective(const KnowledgeEvaluator& ev, const JointLocalState& q, const ProcessSet& scope) {
  return supp(ev, q).intersects(support_scope(ev.net(), q, scope));
}

std::vector<JointLocalState> extensions(const KnowledgeEvaluator& ev, const JointLocalState& q,
                                        const ProcessSet& scope) {
  const Net& net = ev.net();
  const PlaceSet own = net.owned(q.procs);
  std::vector<JointLocalState> out;
  (scope - q.procs).for_each([&](std::size_t pi) {
    JointLocalState base{{}, q.procs};
    base.procs.set(pi);
    const PlaceSet wider = net.owned(base.procs);
    std::set<PlaceSet, CanonicalLess> views;
    for (const Marking& s : ev.universe().states())
      if ((s & own) == q.view) views.insert(s & wider);
    for (const auto& v : views) out.push_back({v, base.procs});
  });
  return out;
}

std::vector<JointLocalState> predecessors(const Net& net, const JointLocalState& q) {
  std::vector<JointLocalState> out;
  q.procs.for_each([&](std::size_t pi) {
    JointLocalState p{{}, q.procs};
    p.procs.reset(pi);
    p.view = q.view & net.owned(p.procs);
    out.push_back(p);
  });
  return out;
}

bool locally_supported(const KnowledgeEvaluator& ev, const Marking& s) {
  for (std::size_t pi = 0; pi < ev.net().process_count(); ++pi) {
    const ProcessSet single = ProcessSet::of({pi});
    if (ev.known_good(s, single, ObservationMode::Weak).intersects(ev.net().process(pi).transitions)) return true;
  }
  return false;
}

class TableBuilder {
 public:
  TableBuilder(const KnowledgeEvaluator& ev, const ProcessSet& scope, std::size_t delay)
      : ev_(ev), net_(ev.net()), scope_(scope), delay_(delay) {}

  void run() { visit({PlaceSet{}, ProcessSet{}}); }

  std::map<JointLocalState, TransitionSet, JointLess> entries;

 private:
  void visit(const JointLocalState& q) {
    if (!visited_.insert(q).second) return;
    if (effective(ev_, q, scope_)) {
      if (q.procs.count() >= 2 && is_minimal_supporting(ev_, q, scope_)) store(q, delay_);
      return;
    }
    for (const auto& child : extensions(ev_, q, scope_)) visit(child);
  }

  void store(const JointLocalState& q, std::size_t remaining) {
    if (remaining == 0 || q.procs == scope_) {
      entries.emplace(q, supp(ev_, q) & net_.transitions_of(scope_));
      return;
    }
    for (const auto& child : extensions(ev_, q, scope_)) store(child, remaining - 1);
  }

  const KnowledgeEvaluator& ev_;
  const Net& net_;
  ProcessSet scope_;
  std::size_t delay_;
  std::set<JointLocalState, JointLess> visited_;
};

}  // namespace

bool is_minimal_supporting(const KnowledgeEvaluator& ev, const JointLocalState& q, const ProcessSet& scope) {
  if (!effective(ev, q, scope)) return false;
  for (const auto& p : predecessors(ev.net(), q))
    if (effective(ev, p, scope)) return false;
  return true;
}

SupportTable build_supervisor_table(const KnowledgeEvaluator& ev, const std::string& name, const ProcessSet& procs,
                                    std::size_t delay_depth) {
  const Net& net = ev.net();
  if (!procs.subset_of(net.all_processes())) throw Error(ErrorKind::UnknownProcess, "supervisor scope out of range");
  SupportTable table{name, procs, {}};
  if (procs.count() < 2) return table;

  TableBuilder builder(ev, procs, delay_depth);
  builder.run();
  for (const auto& [q, ts] : builder.entries) table.entries.push_back({q, ts});

  const TransitionSet scope_transitions = net.transitions_of(procs);
  for (const Marking& s : ev.universe().states()) {
    if (locally_supported(ev, s)) continue;
    const JointLocalState full{s & net.owned(procs), procs};
    if (!supp(ev, full).intersects(scope_transitions)) continue;
    if (table.matching(net, full).empty())
      throw Error(ErrorKind::CoverageGap, "supervisor '" + name + "' has no entry covering good state " +
                                              net.format(s));
  }
  return table;
}

std::vector<Supervisor> partition_for(const Net& net, SupervisorMode mode) {
  if (mode == SupervisorMode::FromFile) return net.supervisors();
  if (net.process_count() < 2) return {};
  return {Supervisor{"T", net.all_processes()}};
}

ProgressVerdict check_progress_criterion(const KnowledgeEvaluator& ev, const std::vector<Supervisor>& partition) {
  const Net& net = ev.net();
  for (const Marking& s : ev.universe().states()) {
    if (is_deadlock(net, s)) continue;
    if (locally_supported(ev, s)) continue;
    bool supervised = false;
    for (const auto& sup : partition)
      if (!sup.processes.empty() && ev.joint_kappa(sup.processes, s)) {
        supervised = true;
        break;
      }
    if (!supervised) return {false, s};
  }
  return {true, std::nullopt};
}

FlagTable ordered_idle_table(const KnowledgeEvaluator& ev, std::size_t process, const OrderPairs& order,
                             const std::vector<Supervisor>& partition) {
  const Net& net = ev.net();
  auto closure = transitive_closure(net.process_count(), order);
  if (!closure) throw Error(ErrorKind::InvalidOrder, "process order is cyclic or reflexive");

  std::vector<ProcessSet> greater;
  for (const auto& sup : partition) {
    ProcessSet g;
    sup.processes.for_each([&](std::size_t other) {
      if ((*closure)[process][other]) g.set(other);
    });
    if (!g.empty()) greater.push_back(g);
  }

  FlagTable table;
  const ProcessSet single = ProcessSet::of({process});
  for (const auto& [view, members] : ev.classes(single, ObservationMode::Weak).cells) {
    bool idle = !greater.empty();
    for (auto j : members) {
      const Marking& s = ev.universe().state(j);
      if (!std::any_of(greater.begin(), greater.end(), [&](const ProcessSet& g) { return ev.joint_kappa(g, s); })) {
        idle = false;
        break;
      }
    }
    table.emplace(view, idle);
  }
  return table;
}

FlagTable hang_table(const KnowledgeEvaluator& ev, std::size_t process, KappaFlavor flavor) {
  FlagTable table;
  const ProcessSet single = ProcessSet::of({process});
  for (const auto& [view, members] : ev.classes(single, ObservationMode::Weak).cells) {
    bool hang = false;
    for (auto j : members)
      if (!ev.hang_condition(process, ev.universe().state(j), flavor)) {
        hang = true;
        break;
      }
    table.emplace(view, hang);
  }
  return table;
}

PastTable past_table(const KnowledgeEvaluator& ev, std::size_t process) {
  const PastAutomaton& pa = ev.past_automaton(process);
  const TransitionSet own = ev.net().process(process).transitions;
  PastTable table;
  table.initial = pa.initial;
  table.edges = pa.edges;
  for (std::uint32_t g = 0; g < pa.states.size(); ++g) {
    PastTable::State st;
    for (auto j : pa.states[g]) st.members.push_back(ev.universe().state(j));
    st.supports = ev.past_known_good(pa, g) & own;
    st.hang = !ev.past_kappa(pa, g);
    table.states.push_back(std::move(st));
  }
  return table;
}

ControllerArtifact emit_controller(const KnowledgeEvaluator& ev, const SynthesisOptions& options) {
  const Net& net = ev.net();
  if (!ev.safe().winnable) throw Error(ErrorKind::NotWinnable, "the safety game is not winnable from s0");

  ControllerArtifact art;
  art.net_hash = net_hash(net);
  art.flavor = options.flavor;
  art.delay_depth = options.delay_depth;
  art.order = options.order ? *options.order : net.order();
  if (!transitive_closure(net.process_count(), art.order))
    throw Error(ErrorKind::InvalidOrder, "process order is cyclic or reflexive");

  const auto partition = partition_for(net, options.supervisors);
  for (std::size_t pi = 0; pi < net.process_count(); ++pi) {
    art.local_tables.push_back(local_support_table(ev, pi));
    art.hang_tables.push_back(hang_table(ev, pi, options.flavor));
    if (!art.order.empty()) art.idle_tables.push_back(ordered_idle_table(ev, pi, art.order, partition));
    if (options.flavor == KappaFlavor::Full) art.past_tables.push_back(past_table(ev, pi));
  }
  for (const auto& sup : partition)
    art.supervisors.push_back(build_supervisor_table(ev, sup.name, sup.processes, options.delay_depth));

  art.progress = check_progress_criterion(ev, partition);
  if (!art.progress.holds && !options.force)
    throw Error(ErrorKind::ProgressCriterionFailed,
                "progress criterion fails at good state " + net.format(*art.progress.counterexample));
  return art;
}

}  // namespace knowctl
