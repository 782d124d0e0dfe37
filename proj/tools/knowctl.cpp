#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "knowctl/error.hpp"
#include "knowctl/game.hpp"
#include "knowctl/io.hpp"
#include "knowctl/knowledge.hpp"
#include "knowctl/petri.hpp"
#include "knowctl/simulator.hpp"
#include "knowctl/synthesis.hpp"

using namespace knowctl;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

ExplorationLimits limits_from_env() {
  ExplorationLimits limits;
  if (const char* cap = std::getenv("KNOWCTL_STATE_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(cap, &end, 10);
    if (end == cap || *end != '\0' || v == 0)
      throw Error(ErrorKind::InvalidArgument, "KNOWCTL_STATE_CAP must be a positive integer");
    limits.max_states = static_cast<std::size_t>(v);
  }
  return limits;
}

OrderPairs parse_order(const Net& net, const std::string& text) {
  OrderPairs order;
  for (const auto& item : split(text, ',')) {
    const auto gt = item.find('>');
    if (gt == std::string::npos)
      throw Error(ErrorKind::InvalidArgument, "order item '" + item + "' must look like 'bigger>smaller'");
    const auto big = split(item.substr(0, gt), ',');
    const auto small = split(item.substr(gt + 1), ',');
    if (big.size() != 1 || small.size() != 1)
      throw Error(ErrorKind::InvalidArgument, "order item '" + item + "' must look like 'bigger>smaller'");
    order.emplace_back(net.process_index(small[0]), net.process_index(big[0]));
  }
  return order;
}

Json executions_json(const Net& net, const std::vector<Execution>& execs) {
  Json arr = Json::array();
  for (const auto& e : execs) {
    Json word = Json::array();
    for (auto t : e.transitions) word.push_back(net.transition(t).name);
    arr.push_back({{"word", word}, {"truncated", e.truncated}, {"lasso", e.lasso}});
  }
  return arr;
}

std::string word_text(const Net& net, const std::vector<std::size_t>& word) {
  std::string out;
  for (auto t : word) out += (out.empty() ? "" : " ") + net.transition(t).name;
  return out.empty() ? "(empty)" : out;
}

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

// ----------------------------------------------------------------------------

struct AnalyzeArgs {
  std::string net;
  bool json = false;
  std::size_t bound = 64;
};

int run_analyze(const AnalyzeArgs& a) {
  const Net net = load_net(a.net);
  const auto limits = limits_from_env();
  const Lts lts = reach_graph(net, limits);
  const InvariantRelation inv = compile_invariant(net);
  const Lts restricted = restricted_reach(net, inv, limits);
  const auto execs = enumerate_executions(net, nullptr, a.bound);
  const auto rexecs = enumerate_executions(net, &inv, a.bound);

  Json j;
  j["places"] = net.places();
  j["transitions"] = Json::array();
  for (const auto& t : net.transitions())
    j["transitions"].push_back({{"name", t.name},
                                {"in", places_json(net, t.inputs)},
                                {"out", places_json(net, t.outputs)},
                                {"controllable", t.controllable}});
  j["processes"] = Json::object();
  for (std::size_t pi = 0; pi < net.process_count(); ++pi) {
    const ProcessSet single = ProcessSet::of({pi});
    j["processes"][net.process(pi).name] = {{"transitions", transitions_json(net, net.process(pi).transitions)},
                                            {"neighborhood", places_json(net, net.neighborhood(single))},
                                            {"owned", places_json(net, net.owned(single))}};
  }
  j["initial"] = places_json(net, net.initial());
  j["reachable"] = lts.size();
  j["deadlocks"] = Json::array();
  for (const auto& d : lts.deadlocks()) j["deadlocks"].push_back(places_json(net, d));
  j["restricted_reachable"] = restricted.size();
  j["executions"] = executions_json(net, execs);
  j["restricted_executions"] = executions_json(net, rexecs);

  if (a.json) {
    emit(j);
    return 0;
  }
  std::cout << "places       " << net.place_count() << "\n"
            << "transitions  " << net.transition_count() << "\n"
            << "processes    " << net.process_count() << "\n";
  for (std::size_t pi = 0; pi < net.process_count(); ++pi) {
    const ProcessSet single = ProcessSet::of({pi});
    std::cout << "  " << net.process(pi).name << "  ngb " << net.format(net.neighborhood(single)) << "  own "
              << net.format(net.owned(single)) << "\n";
  }
  std::cout << "reachable    " << lts.size() << "\n"
            << "restricted   " << restricted.size() << "\n"
            << "deadlocks   ";
  for (const auto& d : lts.deadlocks()) std::cout << " " << net.format(d);
  std::cout << "\nexecutions\n";
  for (const auto& e : execs)
    std::cout << "  " << word_text(net, e.transitions) << (e.truncated ? "  [truncated]" : "")
              << (e.lasso ? "  [lasso]" : "") << "\n";
  std::cout << "restricted executions\n";
  for (const auto& e : rexecs)
    std::cout << "  " << word_text(net, e.transitions) << (e.truncated ? "  [truncated]" : "")
              << (e.lasso ? "  [lasso]" : "") << "\n";
  return 0;
}

struct SolveArgs {
  std::string net;
  bool json = false;
};

int run_solve(const SolveArgs& a) {
  const Net net = load_net(a.net);
  const SafeControl safe = solve(net, compile_invariant(net), limits_from_env());
  if (a.json) {
    emit(solve_to_json(net, safe));
  } else {
    std::cout << "winnable     " << (safe.winnable ? "yes" : "no") << "\n"
              << "iterations   " << safe.iterations << "\n"
              << "attractor    " << safe.attractor.size() << "\n"
              << "good states  " << safe.good.size() << "\n"
              << "safe pairs   " << safe.safe_size() << "\n";
    for (const auto& [s, t] : safe.safe_pairs())
      std::cout << "  " << net.format(s) << " " << net.transition(t).name << "\n";
  }
  return safe.winnable ? 0 : 1;
}

struct KnowArgs {
  std::string net;
  std::string at;
  bool at_given = false;
  std::string formula;
  std::string universe = "good";
  std::string history;
  bool low_memory = false;
  bool json = false;
};

int run_know(const KnowArgs& a) {
  const Net net = load_net(a.net);
  const auto limits = limits_from_env();
  const FormulaPtr f = parse_formula(a.formula, net.symbols());
  const Lts lts = reach_graph(net, limits);
  const InvariantRelation inv = compile_invariant(net);
  const SafeControl safe = solve(net, inv, lts, limits);
  const bool over_good = a.universe == "good";
  const Universe u = over_good ? Universe::over_good(net, safe) : Universe::over_reach(net, lts);
  const KnowledgeEvaluator ev(u, safe, over_good ? safe.graph : lts);

  std::vector<std::size_t> history;
  for (const auto& name : split(a.history, ',')) history.push_back(net.transition_index(name));
  const bool with_history = !a.history.empty();
  if (!a.at_given && !with_history) throw Error(ErrorKind::InvalidArgument, "--at or --history is required");

  Marking s = net.initial();
  if (with_history)
    for (auto t : history) s = fire(net, s, t);
  if (a.at_given) {
    const Marking at = net.marking(split(a.at, ','));
    if (with_history && at != s)
      throw Error(ErrorKind::InvalidArgument, "--at " + net.format(at) + " differs from the marking " +
                                                  net.format(s) + " reached by --history");
    s = at;
  }

  bool value = false;
  if (a.low_memory) {
    if (contains_past(*f)) throw Error(ErrorKind::MalformedFormula, "--low-memory does not evaluate Kp");
    value = ev.holds_low_memory(*f, s);
  } else if (with_history) {
    value = ev.holds_after(*f, history);
  } else {
    value = ev.holds(*f, s);
  }

  if (a.json) {
    Json j;
    j["formula"] = to_string(*f, net.symbols());
    j["at"] = places_json(net, s);
    j["universe"] = a.universe;
    if (with_history) j["history"] = split(a.history, ',');
    j["value"] = value;
    emit(j);
  } else {
    std::cout << (value ? "true" : "false") << "\n";
  }
  return value ? 0 : 1;
}

struct SynthesizeArgs {
  std::string net;
  std::string supervisors;
  std::string kappa = "simplified";
  std::size_t delay_depth = 0;
  bool force = false;
  std::string order;
  std::string out;
  bool json = false;
};

int run_synthesize(const SynthesizeArgs& a) {
  const Net net = load_net(a.net);
  const auto limits = limits_from_env();
  const SafeControl safe = solve(net, compile_invariant(net), limits);
  const Universe u = Universe::over_good(net, safe);
  const KnowledgeEvaluator ev(u, safe, safe.graph);

  SynthesisOptions opts;
  if (a.supervisors.empty())
    opts.supervisors = net.supervisors().empty() ? SupervisorMode::Single : SupervisorMode::FromFile;
  else
    opts.supervisors = a.supervisors == "single" ? SupervisorMode::Single : SupervisorMode::FromFile;
  opts.flavor = a.kappa == "full" ? KappaFlavor::Full : KappaFlavor::Simplified;
  opts.delay_depth = a.delay_depth;
  opts.force = a.force;
  if (!a.order.empty()) opts.order = parse_order(net, a.order);

  const ControllerArtifact art = emit_controller(ev, opts);
  const Json j = controller_to_json(net, art);
  write_file(a.out, j.dump(2) + "\n");

  if (a.json) {
    emit({{"output", a.out},
          {"progress", j["progress"]},
          {"supervisor_entries", [&] {
             std::size_t n = 0;
             for (const auto& s : art.supervisors) n += s.entries.size();
             return n;
           }()}});
  } else {
    std::cout << "wrote " << a.out << "\n"
              << "progress criterion " << (art.progress.holds ? "holds" : "fails") << "\n";
    if (art.progress.counterexample) std::cout << "  counterexample " << net.format(*art.progress.counterexample) << "\n";
    for (const auto& sup : art.supervisors) {
      std::cout << "supervisor " << sup.name << " (" << sup.entries.size() << " entries)\n";
      for (const auto& e : sup.entries)
        std::cout << "  " << net.format(e.state.view) << " " << processes_json(net, e.state.procs).dump() << " -> "
                  << transitions_json(net, e.supports).dump() << "\n";
    }
  }
  return art.progress.holds ? 0 : 1;
}

struct SimulateArgs {
  std::string net;
  std::string controller;
  std::string scheduler = "random";
  std::uint64_t seed = 0;
  std::size_t steps = 100;
  std::string trace;
  bool json = false;
};

int run_simulate(const SimulateArgs& a) {
  const Net net = load_net(a.net);
  const ControllerArtifact art = load_controller(net, a.controller);
  const ControlledSystem sys(net, art);

  std::unique_ptr<Scheduler> scheduler;
  if (a.scheduler == "random") {
    scheduler = std::make_unique<RandomScheduler>(a.seed);
  } else if (a.scheduler == "adversarial") {
    scheduler = std::make_unique<AdversarialScheduler>();
  } else if (a.scheduler.rfind("script:", 0) == 0) {
    scheduler = std::make_unique<ScriptScheduler>(net, art, read_file(a.scheduler.substr(7)));
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown scheduler '" + a.scheduler + "'");
  }

  const Trace trace = simulate(sys, *scheduler, a.steps);
  const TraceVerdict verdict = check_trace(net, compile_invariant(net), trace);
  if (!a.trace.empty()) write_file(a.trace, trace_to_jsonl(sys, trace));

  if (a.json) {
    emit(trace_summary_json(net, trace, verdict));
  } else {
    for (std::size_t i = 0; i < trace.steps.size(); ++i)
      std::cout << i + 1 << "  " << event_to_json(net, art, trace.steps[i].event).dump() << "  "
                << net.format(trace.steps[i].config.marking) << "\n";
    std::cout << "termination  " << to_string(trace.termination) << "\n"
              << "word         " << word_text(net, verdict.word) << "\n"
              << "check        " << (verdict.pass ? "pass" : "FAIL") << "\n";
    for (const auto& v : verdict.violations) std::cout << "  step " << v.index << ": " << v.message << "\n";
  }
  return verdict.pass ? 0 : 1;
}

struct VerifyArgs {
  std::string net;
  std::string controller;
  std::size_t cap = 0;
  bool json = false;
};

int run_verify(const VerifyArgs& a) {
  const Net net = load_net(a.net);
  const auto limits = limits_from_env();
  const ControllerArtifact art = load_controller(net, a.controller);
  const ControlledSystem sys(net, art);
  const SafeControl safe = solve(net, compile_invariant(net), limits);
  VerifyLimits vl;
  vl.max_configurations = a.cap ? a.cap : limits.max_states;
  const VerifyVerdict verdict = exhaustive_verify(sys, safe, vl);
  if (a.json) {
    emit(verify_to_json(net, verdict));
  } else {
    std::cout << (verdict.pass ? "pass" : "FAIL") << "  (" << verdict.configurations << " configurations, longest internal run "
              << verdict.longest_internal_run << ")\n";
    for (const auto& v : verdict.violations)
      std::cout << "  check " << v.check << ": " << v.message << "  witness " << net.format(v.witness) << "\n";
  }
  return verdict.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"knowctl: knowledge-based distributed control for 1-safe Petri nets"};
  app.require_subcommand(1);

  AnalyzeArgs analyze;
  auto* c_analyze = app.add_subcommand("analyze", "Reachability, deadlocks and executions of a net");
  c_analyze->add_option("net", analyze.net, "Net file")->required();
  c_analyze->add_option("--bound", analyze.bound, "Step bound for execution enumeration")->check(CLI::PositiveNumber);
  c_analyze->add_flag("--json", analyze.json, "Machine-readable output only");

  SolveArgs solve_args;
  auto* c_solve = app.add_subcommand("solve", "Solve the safety game");
  c_solve->add_option("net", solve_args.net, "Net file")->required();
  c_solve->add_flag("--json", solve_args.json, "Machine-readable output only");

  KnowArgs know;
  auto* c_know = app.add_subcommand("know", "Evaluate a knowledge formula at a marking");
  c_know->add_option("net", know.net, "Net file")->required();
  auto* at_opt = c_know->add_option("--at", know.at, "Comma-separated marking");
  c_know->add_option("--formula", know.formula, "Formula")->required();
  c_know->add_option("--universe", know.universe, "Universe for knowledge")->check(CLI::IsMember({"good", "reach"}));
  c_know->add_option("--history", know.history, "Comma-separated transitions fired from s0 (for Kp)");
  c_know->add_flag("--low-memory", know.low_memory, "Re-derive classes on demand");
  c_know->add_flag("--json", know.json, "Machine-readable output only");

  SynthesizeArgs synth;
  auto* c_synth = app.add_subcommand("synthesize", "Synthesize a distributed controller");
  c_synth->add_option("net", synth.net, "Net file")->required();
  c_synth->add_option("--supervisors", synth.supervisors, "Supervisor partition")
      ->check(CLI::IsMember({"from-file", "single"}));
  c_synth->add_option("--kappa", synth.kappa, "Hang condition flavor")->check(CLI::IsMember({"simplified", "full"}));
  c_synth->add_option("--delay-depth", synth.delay_depth, "Extra DFS levels before storing supervisor entries");
  c_synth->add_option("--order", synth.order, "Process order, e.g. 'pi_r>pi_l'");
  c_synth->add_flag("--force", synth.force, "Write the controller even if the progress criterion fails");
  c_synth->add_option("-o,--output", synth.out, "Controller file")->required();
  c_synth->add_flag("--json", synth.json, "Machine-readable output only");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Run the controlled system");
  c_sim->add_option("net", sim.net, "Net file")->required();
  c_sim->add_option("controller", sim.controller, "Controller file")->required();
  c_sim->add_option("--scheduler", sim.scheduler, "random | adversarial | script:<file>");
  c_sim->add_option("--seed", sim.seed, "Random seed");
  c_sim->add_option("--steps", sim.steps, "Maximum scheduler steps");
  c_sim->add_option("--trace", sim.trace, "Write the trace as JSON Lines");
  c_sim->add_flag("--json", sim.json, "Machine-readable output only");

  VerifyArgs verify;
  auto* c_verify = app.add_subcommand("verify", "Exhaustively verify a controller");
  c_verify->add_option("net", verify.net, "Net file")->required();
  c_verify->add_option("controller", verify.controller, "Controller file")->required();
  c_verify->add_option("--cap", verify.cap, "Configuration cap");
  c_verify->add_flag("--json", verify.json, "Machine-readable output only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code(ErrorKind::InvalidArgument);
  }

  try {
    if (*c_analyze) return run_analyze(analyze);
    if (*c_solve) return run_solve(solve_args);
    if (*c_know) {
      know.at_given = at_opt->count() > 0;
      return run_know(know);
    }
    if (*c_synth) return run_synthesize(synth);
    if (*c_sim) return run_simulate(sim);
    if (*c_verify) return run_verify(verify);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 10;
  }
  return 0;
}
