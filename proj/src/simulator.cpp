#include "knowctl/simulator.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "knowctl/error.hpp"
#include "knowctl/io.hpp"

namespace knowctl {

namespace {

void mix(std::size_t& h, std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); }

}  // namespace

std::size_t ControlledConfig::hash() const {
  std::size_t h = marking.hash();
  for (auto x : hung_on) mix(h, static_cast<std::size_t>(x + 1));
  for (const auto& v : views) mix(h, v.hash());
  for (const auto& g : grants) mix(h, g ? *g + 1 : 0);
  for (auto x : gamma) mix(h, x);
  return h;
}

std::vector<std::size_t> Trace::word() const {
  std::vector<std::size_t> out;
  for (const auto& step : steps)
    if (step.event.is_firing()) out.push_back(*step.event.transition);
  return out;
}

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Hang: return "hang";
    case EventKind::Unhang: return "unhang";
    case EventKind::Support: return "support";
    case EventKind::FireLocal: return "fire-local";
    case EventKind::FireUncontrollable: return "fire-uncontrollable";
    case EventKind::Stale: return "stale";
  }
  return "?";
}

std::string to_string(UnhangReason reason) {
  switch (reason) {
    case UnhangReason::ViewChanged: return "view-changed";
    case UnhangReason::CoSupported: return "co-supported";
    case UnhangReason::UncontrollableFired: return "uncontrollable-fired";
  }
  return "?";
}

std::string to_string(Termination termination) {
  switch (termination) {
    case Termination::DeadlockInNet: return "deadlock-in-N";
    case Termination::StepBound: return "step-bound";
    case Termination::ControlledDeadlock: return "controlled-deadlock";
  }
  return "?";
}

// ----------------------------------------------------------------------------

ControlledSystem::ControlledSystem(const Net& net, const ControllerArtifact& controller)
    : net_(&net), controller_(&controller), full_(controller.flavor == KappaFlavor::Full) {
  if (controller.net_hash != net_hash(net))
    throw Error(ErrorKind::HashMismatch, "controller was synthesized for a different net (hash " +
                                             controller.net_hash + ")");
  if (controller.local_tables.size() != net.process_count() || controller.hang_tables.size() != net.process_count())
    throw Error(ErrorKind::HashMismatch, "controller tables do not match the net's processes");
  if (full_ && controller.past_tables.size() != net.process_count())
    throw Error(ErrorKind::HashMismatch, "full-flavor controller lacks past tables");
  for (std::size_t pi = 0; pi < net.process_count(); ++pi) ngb_.push_back(net.neighborhood(ProcessSet::of({pi})));
}

PlaceSet ControlledSystem::weak_view(const Marking& s, std::size_t process) const { return s & ngb_[process]; }

std::size_t ControlledSystem::internal_bound() const {
  return net_->process_count() + controller_->supervisors.size() + 1;
}

ControlledConfig ControlledSystem::initial() const {
  ControlledConfig c;
  c.marking = net_->initial();
  c.hung_on.assign(net_->process_count(), kNotHung);
  c.views.assign(controller_->supervisors.size(), PlaceSet{});
  c.grants.assign(controller_->supervisors.size(), std::nullopt);
  if (full_)
    for (const auto& pt : controller_->past_tables) c.gamma.push_back(pt.initial);
  return c;
}

TransitionSet ControlledSystem::support(const ControlledConfig& c, std::size_t process) const {
  if (full_) return controller_->past_tables[process].states.at(c.gamma[process]).supports;
  const auto& table = controller_->local_tables[process];
  auto it = table.find(weak_view(c.marking, process));
  return it == table.end() ? TransitionSet{} : it->second;
}

bool ControlledSystem::wants_to_hang(const ControlledConfig& c, std::size_t process) const {
  if (full_) return controller_->past_tables[process].states.at(c.gamma[process]).hang;
  const auto& table = controller_->hang_tables[process];
  auto it = table.find(weak_view(c.marking, process));
  return it != table.end() && it->second;
}

bool ControlledSystem::idles(const ControlledConfig& c, std::size_t process) const {
  if (controller_->idle_tables.empty()) return false;
  const auto& table = controller_->idle_tables.at(process);
  auto it = table.find(weak_view(c.marking, process));
  return it != table.end() && it->second;
}

ProcessSet ControlledSystem::hung_set(const ControlledConfig& c, std::size_t supervisor) const {
  ProcessSet out;
  for (std::size_t pi = 0; pi < c.hung_on.size(); ++pi)
    if (c.hung_on[pi] == static_cast<std::int32_t>(supervisor)) out.set(pi);
  return out;
}

TransitionSet ControlledSystem::grantable(const ControlledConfig& c, std::size_t supervisor) const {
  const ProcessSet hung = hung_set(c, supervisor);
  TransitionSet out;
  if (hung.empty()) return out;
  for (const SupportEntry* e : controller_->supervisors[supervisor].matching(*net_, {c.views[supervisor], hung}))
    out |= e->supports;
  return out;
}

std::string ControlledSystem::status(const ControlledConfig& c, std::size_t process) const {
  if (c.hung_on[process] != kNotHung) return "hung:" + controller_->supervisors[c.hung_on[process]].name;
  if (support(c, process).empty() && idles(c, process)) return "idle";
  return "active";
}

bool ControlledSystem::views_consistent(const ControlledConfig& c) const {
  for (std::size_t i = 0; i < c.views.size(); ++i)
    if (c.views[i] != (c.marking & net_->owned(hung_set(c, i)))) return false;
  return true;
}

std::optional<Event> ControlledSystem::firing_event(const ControlledConfig& c, std::size_t t) const {
  Event ev;
  ev.transition = t;
  if (!net_->transition(t).controllable) {
    ev.kind = EventKind::FireUncontrollable;
    return ev;
  }
  ev.kind = EventKind::FireLocal;
  std::optional<std::size_t> local;
  net_->owners(t).for_each([&](std::size_t pi) {
    if (!local && c.hung_on[pi] == kNotHung && support(c, pi).test(t)) local = pi;
  });
  if (local) {
    ev.process = local;
    return ev;
  }
  for (std::size_t i = 0; i < c.grants.size(); ++i)
    if (c.grants[i] && *c.grants[i] == t) {
      ev.process = net_->owners(t).front();
      ev.supervisor = i;
      ev.granted = true;
      return ev;
    }
  return std::nullopt;
}

std::vector<Action> ControlledSystem::available(const ControlledConfig& c) const {
  std::vector<Action> out;
  enabled_set(*net_, c.marking).for_each([&](std::size_t t) {
    if (firing_event(c, t)) out.push_back({Action::Kind::Fire, t, std::nullopt});
  });
  for (std::size_t pi = 0; pi < net_->process_count(); ++pi) {
    if (c.hung_on[pi] != kNotHung || !controller_->supervisor_of(pi)) continue;
    if (support(c, pi).empty() && wants_to_hang(c, pi) && !idles(c, pi)) out.push_back({Action::Kind::Hang, pi, std::nullopt});
  }
  for (std::size_t i = 0; i < c.grants.size(); ++i)
    if (!c.grants[i] && !grantable(c, i).empty()) out.push_back({Action::Kind::Support, i, std::nullopt});
  return out;
}

void ControlledSystem::unhang(ControlledConfig& c, std::size_t process) const {
  const auto i = static_cast<std::size_t>(c.hung_on[process]);
  c.hung_on[process] = kNotHung;
  c.views[i] &= net_->owned(hung_set(c, i));
}

std::vector<TraceStep> ControlledSystem::apply(const ControlledConfig& c, const Action& a) const {
  std::vector<TraceStep> steps;
  ControlledConfig next = c;

  switch (a.kind) {
    case Action::Kind::Hang: {
      const std::size_t pi = a.index;
      const auto sup = controller_->supervisor_of(pi);
      if (!sup || c.hung_on[pi] != kNotHung) throw std::logic_error("hang not available");
      Event ev;
      ev.kind = EventKind::Hang;
      ev.process = pi;
      ev.supervisor = *sup;
      ev.payload = weak_view(c.marking, pi);
      next.hung_on[pi] = static_cast<std::int32_t>(*sup);
      next.views[*sup] |= ev.payload & net_->owned(hung_set(next, *sup));
      steps.push_back({ev, next});
      return steps;
    }
    case Action::Kind::Support: {
      const std::size_t i = a.index;
      const TransitionSet options = grantable(c, i);
      if (options.empty() || c.grants[i]) throw std::logic_error("support not available");
      const std::size_t t = a.choice.value_or(options.front());
      if (!options.test(t)) throw std::logic_error("support choice not grantable");
      Event ev;
      ev.kind = EventKind::Support;
      ev.supervisor = i;
      ev.transition = t;
      ev.process = net_->owners(*ev.transition).front();
      next.grants[i] = static_cast<std::uint32_t>(*ev.transition);
      steps.push_back({ev, next});
      return steps;
    }
    case Action::Kind::Fire:
      break;
  }

  const std::size_t t = a.index;
  auto fired = firing_event(c, t);
  if (!fired || !is_enabled(*net_, c.marking, t)) throw std::logic_error("firing not available");
  next.marking = fire(*net_, c.marking, t);
  if (full_)
    for (std::size_t pi = 0; pi < net_->process_count(); ++pi) {
      if (!net_->visible(pi).test(t)) continue;
      auto to = controller_->past_tables[pi].step(next.gamma[pi], t);
      if (!to) throw std::logic_error("firing leaves the past automaton of process " + net_->process(pi).name);
      next.gamma[pi] = *to;
    }
  for (auto& g : next.grants)
    if (g && *g == t) g.reset();
  steps.push_back({*fired, next});

  // Hung members of proc(t) saw their local state change.
  net_->owners(t).for_each([&](std::size_t pi) {
    if (next.hung_on[pi] == kNotHung) return;
    Event ev;
    ev.kind = EventKind::Unhang;
    ev.process = pi;
    ev.supervisor = static_cast<std::size_t>(next.hung_on[pi]);
    ev.reason = net_->transition(t).controllable ? UnhangReason::CoSupported : UnhangReason::UncontrollableFired;
    unhang(next, pi);
    steps.push_back({ev, next});
  });
  // Others may now be able to support something themselves.
  for (std::size_t pi = 0; pi < net_->process_count(); ++pi) {
    if (next.hung_on[pi] == kNotHung || support(next, pi).empty()) continue;
    Event ev;
    ev.kind = EventKind::Unhang;
    ev.process = pi;
    ev.supervisor = static_cast<std::size_t>(next.hung_on[pi]);
    ev.reason = UnhangReason::ViewChanged;
    unhang(next, pi);
    steps.push_back({ev, next});
  }
  for (std::size_t i = 0; i < next.grants.size(); ++i) {
    if (!next.grants[i] || grantable(next, i).test(*next.grants[i])) continue;
    Event ev;
    ev.kind = EventKind::Stale;
    ev.supervisor = i;
    ev.transition = *next.grants[i];
    next.grants[i].reset();
    steps.push_back({ev, next});
  }
  return steps;
}

// ----------------------------------------------------------------------------

std::optional<std::size_t> RandomScheduler::pick(const ControlledSystem&, const ControlledConfig&,
                                                 const std::vector<Action>& actions) {
  if (actions.empty()) return std::nullopt;
  return static_cast<std::size_t>(rng_() % actions.size());
}

std::optional<std::size_t> AdversarialScheduler::pick(const ControlledSystem&, const ControlledConfig&,
                                                      const std::vector<Action>& actions) {
  if (actions.empty()) return std::nullopt;
  for (std::size_t i = 0; i < actions.size(); ++i)
    if (actions[i].kind != Action::Kind::Fire) return i;
  return actions.size() - 1;
}

ScriptScheduler::ScriptScheduler(const Net& net, const ControllerArtifact& controller, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream words(line);
    std::string verb, name, extra;
    if (!(words >> verb) || verb[0] == '#') continue;
    auto fail = [&](const std::string& why) {
      throw Error(ErrorKind::SchedulerScriptInvalid, "script line " + std::to_string(lineno) + ": " + why);
    };
    if (!(words >> name) || (words >> extra)) fail("expected '<verb> <name>'");
    if (verb == "fire") {
      auto t = net.find_transition(name);
      if (!t) fail("unknown transition '" + name + "'");
      script_.push_back({{Action::Kind::Fire, *t, std::nullopt}, line});
    } else if (verb == "hang") {
      auto p = net.find_process(name);
      if (!p) fail("unknown process '" + name + "'");
      script_.push_back({{Action::Kind::Hang, *p, std::nullopt}, line});
    } else if (verb == "support") {
      std::optional<std::size_t> sup;
      for (std::size_t i = 0; i < controller.supervisors.size(); ++i)
        if (controller.supervisors[i].name == name) sup = i;
      if (!sup) fail("unknown supervisor '" + name + "'");
      script_.push_back({{Action::Kind::Support, *sup, std::nullopt}, line});
    } else {
      fail("unknown verb '" + verb + "'");
    }
  }
}

std::optional<std::size_t> ScriptScheduler::pick(const ControlledSystem&, const ControlledConfig&,
                                                 const std::vector<Action>& actions) {
  if (next_ >= script_.size()) return std::nullopt;
  const auto& [action, text] = script_[next_++];
  auto it = std::find(actions.begin(), actions.end(), action);
  if (it == actions.end())
    throw Error(ErrorKind::SchedulerScriptInvalid, "scripted step '" + text + "' is not available");
  return static_cast<std::size_t>(it - actions.begin());
}

Trace simulate(const ControlledSystem& sys, Scheduler& scheduler, std::size_t max_steps) {
  Trace trace;
  trace.initial = sys.initial();
  trace.scheduler = scheduler.name();
  trace.seed = scheduler.seed();
  trace.supervisor_count = sys.controller().supervisors.size();
  ControlledConfig c = trace.initial;
  for (std::size_t step = 0;; ++step) {
    if (is_deadlock(sys.net(), c.marking)) {
      trace.termination = Termination::DeadlockInNet;
      break;
    }
    if (step >= max_steps) {
      trace.termination = Termination::StepBound;
      break;
    }
    const auto actions = sys.available(c);
    if (actions.empty()) {
      trace.termination = Termination::ControlledDeadlock;
      break;
    }
    const auto choice = scheduler.pick(sys, c, actions);
    if (!choice) {
      trace.termination = Termination::StepBound;
      break;
    }
    for (auto& s : sys.apply(c, actions.at(*choice))) trace.steps.push_back(std::move(s));
    c = trace.steps.back().config;
  }
  return trace;
}

// ----------------------------------------------------------------------------

TraceVerdict check_trace(const Net& net, const InvariantRelation& inv, const Trace& trace) {
  TraceVerdict v;
  auto fail = [&](std::size_t index, std::string message) {
    v.pass = false;
    v.violations.push_back({index, std::move(message)});
  };
  Marking s = trace.initial.marking;
  if (s != net.initial()) fail(0, "trace does not start at the initial marking");
  const std::size_t bound = net.process_count() + trace.supervisor_count + 1;
  std::size_t internal = 0;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const Event& ev = trace.steps[i].event;
    const Marking& after = trace.steps[i].config.marking;
    if (ev.is_firing()) {
      internal = 0;
      if (!ev.transition || *ev.transition >= net.transition_count()) {
        fail(i, "firing event without a valid transition");
        return v;
      }
      const std::size_t t = *ev.transition;
      const std::string& name = net.transition(t).name;
      if (!is_enabled(net, s, t)) {
        fail(i, "'" + name + "' is not enabled at " + net.format(s));
        return v;
      }
      if (!inv.allows(s, t)) fail(i, "'" + name + "' at " + net.format(s) + " violates the invariant");
      if (ev.kind == EventKind::FireUncontrollable && net.transition(t).controllable)
        fail(i, "'" + name + "' is controllable but fired as uncontrollable");
      const Marking expected = fire(net, s, t);
      if (after != expected) fail(i, "marking after '" + name + "' should be " + net.format(expected));
      v.word.push_back(t);
      s = expected;
    } else {
      if (after != s) fail(i, to_string(ev.kind) + " event changed the marking");
      if (ev.is_internal() && ++internal > bound)
        fail(i, "more than " + std::to_string(bound) + " controller events without a firing");
    }
  }
  const bool dead = is_deadlock(net, s);
  if (trace.termination == Termination::DeadlockInNet && !dead)
    fail(trace.steps.size(), "trace ends in " + net.format(s) + ", which is not a deadlock of the net");
  if (trace.termination == Termination::ControlledDeadlock && !dead)
    fail(trace.steps.size(), "controlled system is stuck at " + net.format(s));
  return v;
}

namespace {

std::string describe(const ControlledSystem& sys, const ControlledConfig& c) {
  std::string out = sys.net().format(c.marking) + " [";
  for (std::size_t pi = 0; pi < c.hung_on.size(); ++pi) {
    if (pi) out += ", ";
    out += sys.net().process(pi).name + ": " + sys.status(c, pi);
  }
  return out + "]";
}

}  // namespace

VerifyVerdict exhaustive_verify(const ControlledSystem& sys, const SafeControl& safe, const VerifyLimits& limits) {
  const Net& net = sys.net();
  VerifyVerdict verdict;
  auto fail = [&](int check, std::string message, const Marking& witness) {
    verdict.pass = false;
    if (verdict.violations.size() < limits.max_violations)
      verdict.violations.push_back({check, std::move(message), witness});
  };

  std::vector<ControlledConfig> configs;
  std::unordered_map<ControlledConfig, std::uint32_t, ConfigHash> ids;
  std::vector<std::vector<std::uint32_t>> internal_edges;
  std::deque<std::uint32_t> work;
  auto intern = [&](const ControlledConfig& c) {
    auto [it, inserted] = ids.try_emplace(c, static_cast<std::uint32_t>(configs.size()));
    if (inserted) {
      if (configs.size() >= limits.max_configurations)
        throw Error(ErrorKind::StateExplosion, "controlled system exceeds the cap of " +
                                                   std::to_string(limits.max_configurations) + " configurations");
      configs.push_back(c);
      internal_edges.emplace_back();
      work.push_back(it->second);
    }
    return it->second;
  };

  intern(sys.initial());
  while (!work.empty()) {
    const std::uint32_t id = work.front();
    work.pop_front();
    const ControlledConfig c = configs[id];
    if (!sys.views_consistent(c)) fail(0, "supervisor view out of sync at " + describe(sys, c), c.marking);
    if (is_deadlock(net, c.marking)) continue;
    const auto actions = sys.available(c);
    if (actions.empty()) {
      fail(2, "controlled deadlock at " + describe(sys, c), c.marking);
      continue;
    }
    enabled_set(net, c.marking).for_each([&](std::size_t t) {
      if (net.transition(t).controllable) return;
      if (std::find(actions.begin(), actions.end(), Action{Action::Kind::Fire, t, std::nullopt}) == actions.end())
        fail(0, "uncontrollable '" + net.transition(t).name + "' blocked at " + describe(sys, c), c.marking);
    });
    std::vector<Action> moves;
    for (const Action& a : actions) {
      if (a.kind != Action::Kind::Support) {
        moves.push_back(a);
        continue;
      }
      sys.grantable(c, a.index).for_each([&](std::size_t t) { moves.push_back({a.kind, a.index, t}); });
    }
    for (const Action& a : moves) {
      const auto steps = sys.apply(c, a);
      if (a.kind == Action::Kind::Fire && !safe.allows(c.marking, a.index))
        fail(1, "'" + net.transition(a.index).name + "' fired at " + describe(sys, c) + " outside R", c.marking);
      const std::uint32_t to = intern(steps.back().config);
      if (a.kind != Action::Kind::Fire) internal_edges[id].push_back(to);
    }
  }
  verdict.configurations = configs.size();

  // Longest run of controller-internal events; a cycle means an infinite one.
  const std::size_t bound = sys.internal_bound();
  std::vector<int> color(configs.size(), 0);
  std::vector<std::size_t> longest(configs.size(), 0);
  for (std::uint32_t root = 0; root < configs.size(); ++root) {
    if (color[root]) continue;
    std::vector<std::pair<std::uint32_t, std::size_t>> stack{{root, 0}};
    color[root] = 1;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < internal_edges[node].size()) {
        const std::uint32_t child = internal_edges[node][next++];
        if (color[child] == 1) {
          fail(3, "controller events can repeat forever at " + describe(sys, configs[child]), configs[child].marking);
        } else if (color[child] == 0) {
          color[child] = 1;
          stack.push_back({child, 0});
        }
        continue;
      }
      for (auto child : internal_edges[node]) longest[node] = std::max(longest[node], longest[child] + 1);
      color[node] = 2;
      verdict.longest_internal_run = std::max(verdict.longest_internal_run, longest[node]);
      if (longest[node] > bound)
        fail(3, "controller events exceed the bound of " + std::to_string(bound) + " at " +
                    describe(sys, configs[node]), configs[node].marking);
      stack.pop_back();
    }
  }
  return verdict;
}

}  // namespace knowctl
