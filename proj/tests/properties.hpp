#pragma once

// Randomized property checks shared by the property test suite and the
// acceptance binary. Each check runs over `count` seeded random nets and
// compares library results against the brute-force oracle.

#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "knowctl/error.hpp"
#include "knowctl/game.hpp"
#include "knowctl/knowledge.hpp"
#include "knowctl/simulator.hpp"
#include "knowctl/synthesis.hpp"
#include "oracle.hpp"
#include "support.hpp"

namespace properties {

using namespace knowctl;
using testing_support::to_marking;
using testing_support::to_state;

struct Result {
  std::size_t nets = 0;
  std::size_t checks = 0;
  std::size_t violations = 0;
  std::string first;

  void check(bool ok, const std::string& what) {
    ++checks;
    if (ok) return;
    if (violations++ == 0) first = what;
  }
  [[nodiscard]] bool ok() const { return violations == 0; }
  [[nodiscard]] std::string summary() const {
    std::ostringstream o;
    o << nets << " nets, " << checks << " checks, " << violations << " violations";
    if (!ok()) o << " (first: " << first << ")";
    return o.str();
  }
};

struct Case {
  std::uint64_t seed;
  NetDescription desc;
  Net net;
  oracle::ONet onet;
};

inline Case make_case(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto desc = oracle::random_net(rng);
  Net net = Net::build(desc);
  return {seed, desc, std::move(net), oracle::from_description(desc)};
}

inline std::string where(const Case& c, const std::string& what) {
  return "seed " + std::to_string(c.seed) + ": " + what;
}

inline ProcessSet random_procs(std::mt19937_64& rng, std::size_t n) {
  ProcessSet s;
  while (s.empty())
    for (std::size_t i = 0; i < n; ++i)
      if (rng() % 2) s.set(i);
  return s;
}

inline std::vector<int> to_list(const ProcessSet& s) {
  std::vector<int> v;
  s.for_each([&](std::size_t i) { v.push_back(static_cast<int>(i)); });
  return v;
}

/// Random modality-free formula.
inline FormulaPtr random_formula(std::mt19937_64& rng, const Net& net, int depth) {
  const auto pick = rng() % (depth > 0 ? 8 : 4);
  switch (pick) {
    case 0: return Formula::place(rng() % net.place_count());
    case 1: return Formula::enabled(rng() % net.transition_count());
    case 2: return Formula::good(rng() % net.transition_count());
    case 3: return rng() % 2 ? Formula::deadfree() : Formula::constant(rng() % 2);
    case 4: return Formula::negation(random_formula(rng, net, depth - 1));
    case 5: return Formula::conjunction(random_formula(rng, net, depth - 1), random_formula(rng, net, depth - 1));
    case 6: return Formula::disjunction(random_formula(rng, net, depth - 1), random_formula(rng, net, depth - 1));
    default: return Formula::implication(random_formula(rng, net, depth - 1), random_formula(rng, net, depth - 1));
  }
}

/// Reference evaluation of a modality-free formula.
inline bool eval(const oracle::ONet& n, const oracle::Game& g, const Formula& f, const oracle::State& s) {
  switch (f.kind) {
    case FormulaKind::True: return true;
    case FormulaKind::False: return false;
    case FormulaKind::Place: return s[f.index];
    case FormulaKind::Enabled: return oracle::enabled(n, s, static_cast<int>(f.index));
    case FormulaKind::Good: return g.safe.count({s, static_cast<int>(f.index)}) != 0;
    case FormulaKind::Deadfree: return !oracle::deadlock(n, s);
    case FormulaKind::Not: return !eval(n, g, *f.lhs, s);
    case FormulaKind::And: return eval(n, g, *f.lhs, s) && eval(n, g, *f.rhs, s);
    case FormulaKind::Or: return eval(n, g, *f.lhs, s) || eval(n, g, *f.rhs, s);
    case FormulaKind::Implies: return !eval(n, g, *f.lhs, s) || eval(n, g, *f.rhs, s);
    default: return false;
  }
}

struct Solved {
  Lts lts;
  SafeControl safe;
  oracle::Game game;
};

inline Solved solve_case(const Case& c) {
  Lts lts = reach_graph(c.net);
  auto inv = compile_invariant(c.net);
  SafeControl safe = solve(c.net, inv, lts);
  return {std::move(lts), std::move(safe), oracle::solve(c.onet)};
}

// K^s_Π φ → K^w_Π φ, with both modalities also checked against a scan of
// the universe and against the low-memory path.
inline Result ks_implies_kw(std::uint64_t base, std::size_t count) {
  Result r;
  for (std::size_t i = 0; i < count; ++i) {
    Case c = make_case(base + i);
    Solved s = solve_case(c);
    Universe u = Universe::over_reach(c.net, s.lts);
    KnowledgeEvaluator ev(u, s.safe, s.safe.graph);
    std::mt19937_64 rng(c.seed ^ 0x5eedULL);
    std::set<oracle::State> universe;
    for (const auto& m : u.states()) universe.insert(to_state(m, c.net.place_count()));
    for (int round = 0; round < 3; ++round) {
      auto phi = random_formula(rng, c.net, 3);
      ProcessSet procs = random_procs(rng, c.net.process_count());
      auto ids = to_list(procs);
      auto weak_mask = oracle::ngb(c.onet, ids);
      auto strong_mask = oracle::own(c.onet, ids);
      auto truth = [&](const oracle::State& x) { return eval(c.onet, s.game, *phi, x); };
      for (const auto& m : u.states()) {
        const auto st = to_state(m, c.net.place_count());
        const bool ks = ev.knows(m, procs, ObservationMode::Strong, *phi);
        const bool kw = ev.knows(m, procs, ObservationMode::Weak, *phi);
        r.check(!ks || kw, where(c, "Ks holds but Kw fails at " + c.net.format(m)));
        r.check(ks == oracle::knows(universe, st, strong_mask, truth), where(c, "Ks disagrees with oracle"));
        r.check(kw == oracle::knows(universe, st, weak_mask, truth), where(c, "Kw disagrees with oracle"));
        r.check(ks == ev.knows_low_memory(m, procs, ObservationMode::Strong, *phi),
                where(c, "low-memory Ks disagrees"));
      }
    }
    ++r.nets;
  }
  return r;
}

// Π' ⊆ Π implies K_Π' φ → K_Π φ in both modes.
inline Result observer_monotonicity(std::uint64_t base, std::size_t count) {
  Result r;
  for (std::size_t i = 0; i < count; ++i) {
    Case c = make_case(base + i);
    Solved s = solve_case(c);
    Universe u = Universe::over_reach(c.net, s.lts);
    KnowledgeEvaluator ev(u, s.safe, s.safe.graph);
    std::mt19937_64 rng(c.seed ^ 0x0b5ULL);
    for (int round = 0; round < 3; ++round) {
      auto phi = random_formula(rng, c.net, 3);
      ProcessSet big = random_procs(rng, c.net.process_count());
      ProcessSet small;
      while (small.empty()) {
        big.for_each([&](std::size_t pi) {
          if (rng() % 2) small.set(pi);
        });
      }
      for (auto mode : {ObservationMode::Weak, ObservationMode::Strong})
        for (const auto& m : u.states()) {
          const bool lo = ev.knows(m, small, mode, *phi);
          const bool hi = ev.knows(m, big, mode, *phi);
          r.check(!lo || hi, where(c, "knowledge lost when adding observers at " + c.net.format(m)));
        }
    }
    ++r.nets;
  }
  return r;
}

// q ⊑ q' implies supp(q) ⊆ supp(q'), along random chains in L; supp itself
// is compared against the oracle.
inline Result supp_monotonicity(std::uint64_t base, std::size_t count) {
  Result r;
  std::uint64_t seed = base;
  while (r.nets < count && seed < base + 50 * count) {
    Case c = make_case(seed++);
    Solved s = solve_case(c);
    if (!s.safe.winnable) continue;
    Universe u = Universe::over_good(c.net, s.safe);
    KnowledgeEvaluator ev(u, s.safe, s.safe.graph);
    std::mt19937_64 rng(c.seed ^ 0x5099ULL);
    const std::size_t n = c.net.process_count();
    for (const auto& m : u.states()) {
      // A random chain Π1 ⊂ Π2 ⊂ ... ⊂ C, adding one process at a time.
      std::vector<std::size_t> order(n);
      for (std::size_t k = 0; k < n; ++k) order[k] = k;
      std::shuffle(order.begin(), order.end(), rng);
      ProcessSet procs;
      std::optional<JointLocalState> prev;
      std::optional<TransitionSet> prev_supp;
      for (std::size_t k = 0; k < n; ++k) {
        procs.set(order[k]);
        JointLocalState q{local_view(c.net, m, procs, ObservationMode::Strong), procs};
        const TransitionSet sp = supp(ev, q);
        std::set<int> expected = oracle::supp(s.game, c.onet, to_state(q.view, c.net.place_count()),
                                              oracle::own(c.onet, to_list(procs)));
        r.check(sp == TransitionSet::from_indices(expected), where(c, "supp disagrees with oracle"));
        if (prev) {
          r.check(subsumed_by(c.net, *prev, q), where(c, "chain step is not a subsumption"));
          r.check(prev_supp->subset_of(sp), where(c, "supp shrank along a chain at " + c.net.format(m)));
        }
        prev = q;
        prev_supp = sp;
      }
    }
    ++r.nets;
  }
  return r;
}

// attr^k(∅) ⊆ attr^{k+1}(∅), fixpoint within |states| iterations, and the
// whole solution equal to the oracle's.
inline Result attractor_chain(std::uint64_t base, std::size_t count) {
  Result r;
  for (std::size_t i = 0; i < count; ++i) {
    Case c = make_case(base + i);
    Solved s = solve_case(c);
    const auto& g = s.game;
    r.check(s.safe.iterations <= s.lts.size(), where(c, "more iterations than states"));
    r.check(s.safe.iterations == g.iterations, where(c, "iteration count disagrees with oracle"));
    for (std::size_t k = 0; k + 1 <= s.safe.iterations + 1; ++k) {
      auto lo = s.safe.attractor_level(k);
      auto hi = s.safe.attractor_level(k + 1);
      for (const auto& m : lo) r.check(hi.count(m) != 0, where(c, "attractor chain not monotone"));
      std::set<oracle::State> mine;
      for (const auto& m : lo) mine.insert(to_state(m, c.net.place_count()));
      const auto& expected = g.levels[std::min(k, g.levels.size() - 1)];
      r.check(mine == expected, where(c, "attr^" + std::to_string(k) + " disagrees with oracle"));
    }
    r.check(s.safe.winnable == g.winnable, where(c, "winnability disagrees with oracle"));
    std::set<oracle::State> good;
    for (const auto& m : s.safe.good) good.insert(to_state(m, c.net.place_count()));
    r.check(good == g.good, where(c, "G disagrees with oracle"));
    std::set<oracle::Pair> safe;
    for (const auto& [m, t] : s.safe.safe_pairs()) safe.insert({to_state(m, c.net.place_count()), static_cast<int>(t)});
    r.check(safe == g.safe, where(c, "R disagrees with oracle"));
    ++r.nets;
  }
  return r;
}

// reach_I(N) ⊆ reach(N) on nodes and edges; both equal to the oracle.
inline Result restricted_inclusion(std::uint64_t base, std::size_t count) {
  Result r;
  for (std::size_t i = 0; i < count; ++i) {
    Case c = make_case(base + i);
    auto inv = compile_invariant(c.net);
    Lts full = reach_graph(c.net);
    Lts restricted = restricted_reach(c.net, inv);
    for (const auto& m : restricted.states()) r.check(full.contains(m), where(c, "restricted state not reachable"));
    for (const auto& e : restricted.edges())
      r.check(full.has_edge(restricted.state(e.source), e.transition), where(c, "restricted edge not in reach graph"));
    auto expected_full = oracle::reach(c.onet);
    auto expected_restricted =
        oracle::reach(c.onet, [&](const oracle::State& s, int t) { return oracle::allowed(c.onet, s, t); });
    r.check(full.size() == expected_full.states.size() && full.edges().size() == expected_full.edges.size(),
            where(c, "reach graph disagrees with oracle"));
    r.check(restricted.size() == expected_restricted.states.size() &&
                restricted.edges().size() == expected_restricted.edges.size(),
            where(c, "restricted reach disagrees with oracle"));
    for (const auto& [src, t, dst] : expected_restricted.edges)
      r.check(restricted.has_edge(to_marking(src), static_cast<std::size_t>(t)), where(c, "missing restricted edge"));
    ++r.nets;
  }
  return r;
}

// For π ∉ Π: s⌊_{Π∪{π}} = s⌊_Π ⊎ (s⌈_π ∩ own(Π∪{π})).
inline Result update_lemma(std::uint64_t base, std::size_t count) {
  Result r;
  for (std::size_t i = 0; i < count; ++i) {
    Case c = make_case(base + i);
    Lts lts = reach_graph(c.net);
    std::mt19937_64 rng(c.seed ^ 0xa11ULL);
    const std::size_t n = c.net.process_count();
    for (int round = 0; round < 4; ++round) {
      ProcessSet procs = random_procs(rng, n);
      if (procs.count() == n) procs.reset(rng() % n);
      if (procs.empty()) procs.set(0);
      std::size_t pi = rng() % n;
      while (procs.test(pi)) pi = (pi + 1) % n;
      ProcessSet joined = procs;
      joined.set(pi);
      const PlaceSet own_joined = observation_places(c.net, joined, ObservationMode::Strong);
      r.check(testing_support::to_mask(own_joined, c.net.place_count()) == oracle::own(c.onet, to_list(joined)),
              where(c, "own() disagrees with oracle"));
      for (const auto& s : lts.states()) {
        const PlaceSet lhs = local_view(c.net, s, joined, ObservationMode::Strong);
        const PlaceSet old = local_view(c.net, s, procs, ObservationMode::Strong);
        const PlaceSet added = local_view(c.net, s, ProcessSet::of({pi}), ObservationMode::Weak) & own_joined;
        r.check(!old.intersects(added), where(c, "update contributions overlap"));
        r.check(lhs == (old | added), where(c, "update lemma fails at " + c.net.format(s)));
      }
    }
    ++r.nets;
  }
  return r;
}

// Every trace of the controlled system passes the trace checker, for the
// random and the adversarial scheduler.
inline Result traces_pass(std::uint64_t base, std::size_t count) {
  Result r;
  std::uint64_t seed = base;
  while (r.nets < count && seed < base + 50 * count) {
    Case c = make_case(seed++);
    Solved s = solve_case(c);
    if (!s.safe.winnable) continue;
    Universe u = Universe::over_good(c.net, s.safe);
    KnowledgeEvaluator ev(u, s.safe, s.safe.graph);
    SynthesisOptions opts;
    opts.supervisors = SupervisorMode::Single;
    opts.force = true;
    std::optional<ControllerArtifact> art;
    try {
      art = emit_controller(ev, opts);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::CoverageGap) continue;
      throw;
    }
    ControlledSystem sys(c.net, *art);
    auto inv = compile_invariant(c.net);
    for (std::uint64_t k = 0; k < 3; ++k) {
      RandomScheduler sched(c.seed * 7 + k);
      Trace t = simulate(sys, sched, 60);
      auto verdict = check_trace(c.net, inv, t);
      r.check(verdict.pass, where(c, "random trace rejected: " +
                                         (verdict.violations.empty() ? "" : verdict.violations.front().message)));
    }
    AdversarialScheduler adv;
    Trace t = simulate(sys, adv, 60);
    r.check(check_trace(c.net, inv, t).pass, where(c, "adversarial trace rejected"));
    ++r.nets;
  }
  return r;
}

// Every reachable Γ of every past automaton lies inside one weak class.
inline Result past_refines_weak(std::uint64_t base, std::size_t count) {
  Result r;
  std::uint64_t seed = base;
  while (r.nets < count && seed < base + 50 * count) {
    Case c = make_case(seed++);
    Solved s = solve_case(c);
    if (!s.safe.winnable) continue;
    Universe u = Universe::over_good(c.net, s.safe);
    KnowledgeEvaluator ev(u, s.safe, s.safe.graph);
    for (std::size_t pi = 0; pi < c.net.process_count(); ++pi) {
      const auto& pa = ev.past_automaton(pi);
      const auto mask = oracle::ngb(c.onet, {static_cast<int>(pi)});
      for (const auto& gamma : pa.states) {
        r.check(!gamma.empty(), where(c, "empty past state"));
        if (gamma.empty()) continue;
        const auto first = oracle::project(to_state(u.state(gamma.front()), c.net.place_count()), mask);
        for (auto idx : gamma)
          r.check(oracle::project(to_state(u.state(idx), c.net.place_count()), mask) == first,
                  where(c, "past state mixes local information"));
      }
    }
    ++r.nets;
  }
  return r;
}

// Whenever the progress criterion holds, the controller passes exhaustive
// verification, for random supervisor partitions and both κ flavors.
inline Result controllers_verify(std::uint64_t base, std::size_t count) {
  Result r;
  std::uint64_t seed = base;
  while (r.nets < count && seed < base + 50 * count) {
    std::mt19937_64 rng(seed++);
    auto desc = oracle::random_net(rng);
    const auto& ps = desc.processes;
    if (ps.size() == 3) {
      const std::size_t k = rng() % 3;
      std::vector<std::string> rest, alone;
      for (std::size_t i = 0; i < 3; ++i) (i == k ? alone : rest).push_back(ps[i].first);
      desc.supervisors = {{"S", rest}};
      if (rng() % 2) desc.supervisors.push_back({"U", alone});
    } else {
      desc.supervisors = {{"S", {ps[0].first, ps[1].first}}};
    }
    Net net = Net::build(desc);
    SafeControl safe = solve(net, compile_invariant(net));
    if (!safe.winnable) continue;
    Universe u = Universe::over_good(net, safe);
    KnowledgeEvaluator ev(u, safe, safe.graph);
    bool any = false;
    for (auto flavor : {KappaFlavor::Simplified, KappaFlavor::Full}) {
      SynthesisOptions opts;
      opts.flavor = flavor;
      ControllerArtifact art;
      try {
        art = emit_controller(ev, opts);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::ProgressCriterionFailed) continue;
        throw;
      }
      any = true;
      ControlledSystem sys(net, art);
      auto v = exhaustive_verify(sys, safe);
      r.check(v.pass, "seed " + std::to_string(seed - 1) + ": " +
                          (v.violations.empty() ? std::string() : v.violations.front().message));
    }
    if (any) ++r.nets;
  }
  return r;
}

}  // namespace properties
