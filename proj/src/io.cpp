#include "knowctl/io.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <sstream>

#include "knowctl/error.hpp"

namespace knowctl {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  out << contents;
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

namespace {

[[noreturn]] void syntax(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::Syntax, where + ": " + what);
}

const Json& member(const Json& j, const std::string& key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) syntax(where, "missing key '" + key + "'");
  return *it;
}

std::string string_at(const Json& j, const std::string& where) {
  if (!j.is_string()) syntax(where, "expected a string");
  return j.get<std::string>();
}

std::vector<std::string> strings_at(const Json& j, const std::string& where) {
  if (!j.is_array()) syntax(where, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(string_at(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::pair<std::string, std::string>> pairs_at(const Json& j, const std::string& where) {
  if (!j.is_array()) syntax(where, "expected an array of 2-element arrays");
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    auto v = strings_at(j[i], at);
    if (v.size() != 2) syntax(at, "expected exactly two names");
    out.emplace_back(v[0], v[1]);
  }
  return out;
}

std::vector<std::pair<std::string, std::vector<std::string>>> groups_at(const Json& j, const std::string& where) {
  if (!j.is_object()) syntax(where, "expected an object mapping names to arrays");
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  for (auto it = j.begin(); it != j.end(); ++it) out.emplace_back(it.key(), strings_at(it.value(), where + "." + it.key()));
  return out;
}

void only_keys(const Json& j, std::initializer_list<const char*> keys, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) syntax(where, "unknown key '" + it.key() + "'");
  }
}

Json parse_json(std::string_view text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorKind::Syntax, what + " line " + std::to_string(line) + ", column " + std::to_string(col) +
                                       ": malformed JSON");
  }
}

}  // namespace

NetDescription net_description_from_json(const Json& j) {
  if (!j.is_object()) syntax("net", "expected a JSON object");
  only_keys(j, {"places", "transitions", "initial", "processes", "priorities", "invariant", "supervisors", "order"},
            "net");
  NetDescription d;
  d.places = strings_at(member(j, "places", "net"), "places");
  const Json& ts = member(j, "transitions", "net");
  if (!ts.is_array()) syntax("transitions", "expected an array");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const std::string at = "transitions[" + std::to_string(i) + "]";
    if (!ts[i].is_object()) syntax(at, "expected an object");
    only_keys(ts[i], {"name", "in", "out", "controllable"}, at);
    TransitionDescription t;
    t.name = string_at(member(ts[i], "name", at), at + ".name");
    t.inputs = strings_at(member(ts[i], "in", at), at + ".in");
    t.outputs = strings_at(member(ts[i], "out", at), at + ".out");
    if (auto c = ts[i].find("controllable"); c != ts[i].end()) {
      if (!c->is_boolean()) syntax(at + ".controllable", "expected a boolean");
      t.controllable = c->get<bool>();
    }
    d.transitions.push_back(std::move(t));
  }
  d.initial = strings_at(member(j, "initial", "net"), "initial");
  d.processes = groups_at(member(j, "processes", "net"), "processes");
  if (auto p = j.find("priorities"); p != j.end()) d.priorities = pairs_at(*p, "priorities");
  if (auto s = j.find("supervisors"); s != j.end()) d.supervisors = groups_at(*s, "supervisors");
  if (auto o = j.find("order"); o != j.end()) d.order = pairs_at(*o, "order");
  if (auto inv = j.find("invariant"); inv != j.end()) {
    if (!inv->is_object()) syntax("invariant", "expected an object");
    only_keys(*inv, {"kind", "expr", "mode", "pairs"}, "invariant");
    InvariantDescription id;
    id.kind = string_at(member(*inv, "kind", "invariant"), "invariant.kind");
    if (id.kind != "priorities" && id.kind != "state_predicate" && id.kind != "pairs")
      syntax("invariant.kind", "expected \"priorities\", \"state_predicate\" or \"pairs\"");
    if (auto e = inv->find("expr"); e != inv->end()) id.expr = string_at(*e, "invariant.expr");
    if (id.kind == "state_predicate" && inv->find("expr") == inv->end())
      syntax("invariant", "state_predicate requires 'expr'");
    if (auto m = inv->find("mode"); m != inv->end()) id.mode = string_at(*m, "invariant.mode");
    if (auto ps = inv->find("pairs"); ps != inv->end()) {
      if (!ps->is_array()) syntax("invariant.pairs", "expected an array");
      for (std::size_t i = 0; i < ps->size(); ++i) {
        const std::string at = "invariant.pairs[" + std::to_string(i) + "]";
        const Json& p = (*ps)[i];
        if (!p.is_object()) syntax(at, "expected an object");
        only_keys(p, {"marking", "when", "transition"}, at);
        PairDescription pd;
        if (auto m = p.find("marking"); m != p.end()) pd.marking = strings_at(*m, at + ".marking");
        if (auto w = p.find("when"); w != p.end()) pd.when = string_at(*w, at + ".when");
        if (auto t = p.find("transition"); t != p.end()) pd.transition = string_at(*t, at + ".transition");
        id.pairs.push_back(std::move(pd));
      }
    }
    d.invariant = std::move(id);
  }
  return d;
}

Json net_description_to_json(const NetDescription& d) {
  Json j;
  j["places"] = d.places;
  j["transitions"] = Json::array();
  for (const auto& t : d.transitions)
    j["transitions"].push_back({{"name", t.name}, {"in", t.inputs}, {"out", t.outputs}, {"controllable", t.controllable}});
  j["initial"] = d.initial;
  j["processes"] = Json::object();
  for (const auto& [name, ts] : d.processes) j["processes"][name] = ts;
  j["priorities"] = Json::array();
  for (const auto& [lo, hi] : d.priorities) j["priorities"].push_back({lo, hi});
  if (d.invariant) {
    Json inv;
    inv["kind"] = d.invariant->kind;
    if (d.invariant->kind == "state_predicate") {
      inv["expr"] = d.invariant->expr;
      inv["mode"] = d.invariant->mode;
    }
    if (d.invariant->kind == "pairs") {
      inv["pairs"] = Json::array();
      for (const auto& p : d.invariant->pairs) {
        Json pj;
        if (p.marking) pj["marking"] = *p.marking;
        if (p.when) pj["when"] = *p.when;
        pj["transition"] = p.transition;
        inv["pairs"].push_back(pj);
      }
    }
    j["invariant"] = inv;
  }
  j["supervisors"] = Json::object();
  for (const auto& [name, ps] : d.supervisors) j["supervisors"][name] = ps;
  j["order"] = Json::array();
  for (const auto& [a, b] : d.order) j["order"].push_back({a, b});
  return j;
}

Net parse_net(std::string_view text) { return Net::build(net_description_from_json(parse_json(text, "net"))); }

Net load_net(const std::string& path) {
  try {
    return parse_net(read_file(path));
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

Json net_to_json(const Net& net) { return net_description_to_json(net.describe()); }

std::string net_hash(const Net& net) {
  const std::string text = net_to_json(net).dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::Io, "SHA-256 digest failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return out.str();
}

Json places_json(const Net& net, const PlaceSet& places) { return net.place_names(places); }
Json transitions_json(const Net& net, const TransitionSet& transitions) { return net.transition_names(transitions); }
Json processes_json(const Net& net, const ProcessSet& processes) { return net.process_names(processes); }

Json solve_to_json(const Net& net, const SafeControl& safe) {
  Json j;
  j["winnable"] = safe.winnable;
  j["iterations"] = safe.iterations;
  j["attractor"] = Json::array();
  for (const auto& s : sorted(safe.attractor)) j["attractor"].push_back(places_json(net, s));
  j["good"] = Json::array();
  for (const auto& s : safe.good_sorted()) j["good"].push_back(places_json(net, s));
  j["safe"] = Json::array();
  for (const auto& [s, t] : safe.safe_pairs()) j["safe"].push_back({places_json(net, s), net.transition(t).name});
  return j;
}

// ----------------------------------------------------------------------------

namespace {

const char* flavor_name(KappaFlavor f) { return f == KappaFlavor::Full ? "full" : "simplified"; }

PlaceSet places_from(const Net& net, const Json& j, const std::string& where) {
  PlaceSet out;
  for (const auto& n : strings_at(j, where)) {
    auto p = net.find_place(n);
    if (!p) throw Error(ErrorKind::UnknownPlace, where + ": unknown place '" + n + "'");
    out.set(*p);
  }
  return out;
}

TransitionSet transitions_from(const Net& net, const Json& j, const std::string& where) {
  TransitionSet out;
  for (const auto& n : strings_at(j, where)) {
    auto t = net.find_transition(n);
    if (!t) throw Error(ErrorKind::UnknownTransition, where + ": unknown transition '" + n + "'");
    out.set(*t);
  }
  return out;
}

ProcessSet processes_from(const Net& net, const Json& j, const std::string& where) {
  ProcessSet out;
  for (const auto& n : strings_at(j, where)) {
    auto p = net.find_process(n);
    if (!p) throw Error(ErrorKind::UnknownProcess, where + ": unknown process '" + n + "'");
    out.set(*p);
  }
  return out;
}

std::size_t process_from(const Net& net, const std::string& name, const std::string& where) {
  auto p = net.find_process(name);
  if (!p) throw Error(ErrorKind::UnknownProcess, where + ": unknown process '" + name + "'");
  return *p;
}

std::size_t count_at(const Json& j, const std::string& where) {
  if (!j.is_number_unsigned()) syntax(where, "expected a non-negative integer");
  return j.get<std::size_t>();
}

bool bool_at(const Json& j, const std::string& where) {
  if (!j.is_boolean()) syntax(where, "expected a boolean");
  return j.get<bool>();
}

template <typename Table, typename Value>
Json flag_or_support_table(const Net& net, const Table& table, const char* field, Value value) {
  Json arr = Json::array();
  for (const auto& [view, v] : table) arr.push_back({{"view", places_json(net, view)}, {field, value(v)}});
  return arr;
}

// Per-process object; every process must be present.
template <typename F>
void per_process(const Net& net, const Json& j, const std::string& where, F&& f) {
  if (!j.is_object()) syntax(where, "expected an object keyed by process");
  for (auto it = j.begin(); it != j.end(); ++it) (void)process_from(net, it.key(), where);
  for (std::size_t pi = 0; pi < net.process_count(); ++pi) {
    const std::string& name = net.process(pi).name;
    auto it = j.find(name);
    if (it == j.end()) syntax(where, "missing process '" + name + "'");
    f(pi, *it, where + "." + name);
  }
}

}  // namespace

Json controller_to_json(const Net& net, const ControllerArtifact& art) {
  Json j;
  j["net_hash"] = art.net_hash;
  j["flavor"] = flavor_name(art.flavor);
  j["delay_depth"] = art.delay_depth;
  j["local_tables"] = Json::object();
  j["hang_tables"] = Json::object();
  for (std::size_t pi = 0; pi < net.process_count(); ++pi) {
    const std::string& name = net.process(pi).name;
    j["local_tables"][name] = flag_or_support_table(net, art.local_tables[pi], "supports",
                                                    [&](const TransitionSet& ts) { return transitions_json(net, ts); });
    j["hang_tables"][name] = flag_or_support_table(net, art.hang_tables[pi], "hang", [](bool b) { return b; });
  }
  j["idle_tables"] = Json::object();
  for (std::size_t pi = 0; pi < art.idle_tables.size(); ++pi)
    j["idle_tables"][net.process(pi).name] =
        flag_or_support_table(net, art.idle_tables[pi], "idle", [](bool b) { return b; });
  j["supervisors"] = Json::object();
  for (const auto& sup : art.supervisors) {
    Json entries = Json::array();
    for (const auto& e : sup.entries)
      entries.push_back({{"view", places_json(net, e.state.view)},
                         {"procs", processes_json(net, e.state.procs)},
                         {"supports", transitions_json(net, e.supports)}});
    j["supervisors"][sup.name] = {{"procs", processes_json(net, sup.procs)}, {"entries", entries}};
  }
  j["order"] = Json::array();
  for (auto [a, b] : art.order) j["order"].push_back({net.process(a).name, net.process(b).name});
  if (art.flavor == KappaFlavor::Full) {
    j["past_tables"] = Json::object();
    for (std::size_t pi = 0; pi < art.past_tables.size(); ++pi) {
      const PastTable& pt = art.past_tables[pi];
      Json states = Json::array();
      for (std::size_t g = 0; g < pt.states.size(); ++g) {
        Json members = Json::array();
        for (const auto& m : pt.states[g].members) members.push_back(places_json(net, m));
        states.push_back({{"id", g},
                          {"members", members},
                          {"supports", transitions_json(net, pt.states[g].supports)},
                          {"hang", pt.states[g].hang}});
      }
      Json edges = Json::array();
      for (const auto& e : pt.edges)
        edges.push_back({{"from", e.from}, {"transition", net.transition(e.transition).name}, {"to", e.to}});
      j["past_tables"][net.process(pi).name] = {{"initial", pt.initial}, {"states", states}, {"edges", edges}};
    }
  }
  Json progress = {{"holds", art.progress.holds}};
  progress["counterexample"] =
      art.progress.counterexample ? places_json(net, *art.progress.counterexample) : Json(nullptr);
  j["progress"] = progress;
  return j;
}

ControllerArtifact controller_from_json(const Net& net, const Json& j) {
  const std::string root = "controller";
  if (!j.is_object()) syntax(root, "expected a JSON object");
  only_keys(j, {"net_hash", "flavor", "delay_depth", "local_tables", "hang_tables", "idle_tables", "supervisors",
                "order", "past_tables", "progress"},
            root);
  ControllerArtifact art;
  art.net_hash = string_at(member(j, "net_hash", root), "net_hash");
  if (art.net_hash != net_hash(net))
    throw Error(ErrorKind::HashMismatch, "controller was synthesized for a different net (hash " + art.net_hash + ")");
  const std::string flavor = string_at(member(j, "flavor", root), "flavor");
  if (flavor == "full")
    art.flavor = KappaFlavor::Full;
  else if (flavor == "simplified")
    art.flavor = KappaFlavor::Simplified;
  else
    syntax("flavor", "expected \"simplified\" or \"full\"");
  if (auto d = j.find("delay_depth"); d != j.end()) art.delay_depth = count_at(*d, "delay_depth");

  art.local_tables.resize(net.process_count());
  art.hang_tables.resize(net.process_count());
  auto read_rows = [&](const Json& rows, const std::string& where, const char* field, auto&& store) {
    if (!rows.is_array()) syntax(where, "expected an array");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::string at = where + "[" + std::to_string(i) + "]";
      if (!rows[i].is_object()) syntax(at, "expected an object");
      store(places_from(net, member(rows[i], "view", at), at + ".view"), member(rows[i], field, at), at + "." + field);
    }
  };
  per_process(net, member(j, "local_tables", root), "local_tables", [&](std::size_t pi, const Json& rows, const std::string& at) {
    read_rows(rows, at, "supports", [&](const PlaceSet& v, const Json& x, const std::string& w) {
      art.local_tables[pi][v] = transitions_from(net, x, w);
    });
  });
  per_process(net, member(j, "hang_tables", root), "hang_tables", [&](std::size_t pi, const Json& rows, const std::string& at) {
    read_rows(rows, at, "hang", [&](const PlaceSet& v, const Json& x, const std::string& w) {
      art.hang_tables[pi][v] = bool_at(x, w);
    });
  });
  if (auto idle = j.find("idle_tables"); idle != j.end() && !idle->empty()) {
    art.idle_tables.resize(net.process_count());
    per_process(net, *idle, "idle_tables", [&](std::size_t pi, const Json& rows, const std::string& at) {
      read_rows(rows, at, "idle", [&](const PlaceSet& v, const Json& x, const std::string& w) {
        art.idle_tables[pi][v] = bool_at(x, w);
      });
    });
  }

  const Json& sups = member(j, "supervisors", root);
  if (!sups.is_object()) syntax("supervisors", "expected an object");
  ProcessSet seen;
  for (auto it = sups.begin(); it != sups.end(); ++it) {
    const std::string at = "supervisors." + it.key();
    if (!it->is_object()) syntax(at, "expected an object");
    SupportTable table;
    table.name = it.key();
    table.procs = processes_from(net, member(*it, "procs", at), at + ".procs");
    if (table.procs.intersects(seen))
      throw Error(ErrorKind::OverlappingSupervisors, at + ": process assigned to more than one supervisor");
    seen |= table.procs;
    const Json& entries = member(*it, "entries", at);
    if (!entries.is_array()) syntax(at + ".entries", "expected an array");
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const std::string e_at = at + ".entries[" + std::to_string(i) + "]";
      const Json& e = entries[i];
      if (!e.is_object()) syntax(e_at, "expected an object");
      SupportEntry entry;
      entry.state.view = places_from(net, member(e, "view", e_at), e_at + ".view");
      entry.state.procs = processes_from(net, member(e, "procs", e_at), e_at + ".procs");
      entry.supports = transitions_from(net, member(e, "supports", e_at), e_at + ".supports");
      if (!entry.state.procs.subset_of(table.procs)) syntax(e_at, "entry processes outside the supervisor's scope");
      table.entries.push_back(entry);
    }
    art.supervisors.push_back(std::move(table));
  }

  if (auto o = j.find("order"); o != j.end())
    for (const auto& [a, b] : pairs_at(*o, "order"))
      art.order.emplace_back(process_from(net, a, "order"), process_from(net, b, "order"));
  if (!transitive_closure(net.process_count(), art.order))
    throw Error(ErrorKind::InvalidOrder, "order: process order is cyclic or reflexive");

  if (auto past = j.find("past_tables"); past != j.end()) {
    art.past_tables.resize(net.process_count());
    per_process(net, *past, "past_tables", [&](std::size_t pi, const Json& pj, const std::string& at) {
      PastTable& pt = art.past_tables[pi];
      if (!pj.is_object()) syntax(at, "expected an object");
      pt.initial = static_cast<std::uint32_t>(count_at(member(pj, "initial", at), at + ".initial"));
      const Json& states = member(pj, "states", at);
      if (!states.is_array()) syntax(at + ".states", "expected an array");
      for (std::size_t g = 0; g < states.size(); ++g) {
        const std::string s_at = at + ".states[" + std::to_string(g) + "]";
        const Json& sj = states[g];
        if (!sj.is_object()) syntax(s_at, "expected an object");
        if (count_at(member(sj, "id", s_at), s_at + ".id") != g) syntax(s_at + ".id", "ids must be consecutive");
        PastTable::State st;
        const Json& members = member(sj, "members", s_at);
        if (!members.is_array()) syntax(s_at + ".members", "expected an array");
        for (std::size_t m = 0; m < members.size(); ++m)
          st.members.push_back(places_from(net, members[m], s_at + ".members[" + std::to_string(m) + "]"));
        st.supports = transitions_from(net, member(sj, "supports", s_at), s_at + ".supports");
        st.hang = bool_at(member(sj, "hang", s_at), s_at + ".hang");
        pt.states.push_back(std::move(st));
      }
      const Json& edges = member(pj, "edges", at);
      if (!edges.is_array()) syntax(at + ".edges", "expected an array");
      for (std::size_t k = 0; k < edges.size(); ++k) {
        const std::string e_at = at + ".edges[" + std::to_string(k) + "]";
        const Json& ej = edges[k];
        if (!ej.is_object()) syntax(e_at, "expected an object");
        const auto from = count_at(member(ej, "from", e_at), e_at + ".from");
        const auto to = count_at(member(ej, "to", e_at), e_at + ".to");
        const std::string tname = string_at(member(ej, "transition", e_at), e_at + ".transition");
        auto t = net.find_transition(tname);
        if (!t) throw Error(ErrorKind::UnknownTransition, e_at + ": unknown transition '" + tname + "'");
        if (from >= pt.states.size() || to >= pt.states.size()) syntax(e_at, "state id out of range");
        pt.edges.push_back({static_cast<std::uint32_t>(from), static_cast<std::uint32_t>(*t),
                            static_cast<std::uint32_t>(to)});
      }
      if (pt.initial >= pt.states.size()) syntax(at + ".initial", "state id out of range");
    });
  }
  if (art.flavor == KappaFlavor::Full && art.past_tables.empty()) syntax(root, "full flavor requires past_tables");

  if (auto p = j.find("progress"); p != j.end() && p->is_object()) {
    if (auto h = p->find("holds"); h != p->end()) art.progress.holds = bool_at(*h, "progress.holds");
    if (auto c = p->find("counterexample"); c != p->end() && !c->is_null())
      art.progress.counterexample = places_from(net, *c, "progress.counterexample");
  }
  return art;
}

ControllerArtifact load_controller(const Net& net, const std::string& path) {
  try {
    return controller_from_json(net, parse_json(read_file(path), "controller"));
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

// ----------------------------------------------------------------------------

Json event_to_json(const Net& net, const ControllerArtifact& art, const Event& ev) {
  Json j;
  j["kind"] = to_string(ev.kind);
  if (ev.process) j["process"] = net.process(*ev.process).name;
  if (ev.supervisor) j["supervisor"] = art.supervisors.at(*ev.supervisor).name;
  if (ev.transition) j["transition"] = net.transition(*ev.transition).name;
  if (ev.kind == EventKind::Hang) j["payload"] = places_json(net, ev.payload);
  if (ev.kind == EventKind::Unhang) j["reason"] = to_string(ev.reason);
  if (ev.kind == EventKind::FireLocal) j["granted"] = ev.granted;
  return j;
}

namespace {

Json config_fields(const ControlledSystem& sys, const ControlledConfig& c, Json j) {
  const Net& net = sys.net();
  j["marking"] = places_json(net, c.marking);
  Json statuses = Json::object();
  for (std::size_t pi = 0; pi < net.process_count(); ++pi) statuses[net.process(pi).name] = sys.status(c, pi);
  j["statuses"] = statuses;
  Json views = Json::object();
  for (std::size_t i = 0; i < c.views.size(); ++i) views[sys.controller().supervisors[i].name] = places_json(net, c.views[i]);
  j["views"] = views;
  return j;
}

}  // namespace

std::string trace_to_jsonl(const ControlledSystem& sys, const Trace& trace) {
  std::string out;
  Json start;
  start["idx"] = 0;
  start["event"] = {{"kind", "start"}, {"scheduler", trace.scheduler}, {"seed", trace.seed}};
  out += config_fields(sys, trace.initial, start).dump() + "\n";
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    Json line;
    line["idx"] = i + 1;
    line["event"] = event_to_json(sys.net(), sys.controller(), trace.steps[i].event);
    out += config_fields(sys, trace.steps[i].config, line).dump() + "\n";
  }
  return out;
}

Json trace_summary_json(const Net& net, const Trace& trace, const TraceVerdict& verdict) {
  Json j;
  j["scheduler"] = trace.scheduler;
  j["seed"] = trace.seed;
  j["events"] = trace.steps.size();
  j["termination"] = to_string(trace.termination);
  Json word = Json::array();
  for (auto t : verdict.word) word.push_back(net.transition(t).name);
  j["word"] = word;
  j["final_marking"] = places_json(net, trace.steps.empty() ? trace.initial.marking : trace.steps.back().config.marking);
  j["pass"] = verdict.pass;
  Json violations = Json::array();
  for (const auto& v : verdict.violations) violations.push_back({{"index", v.index}, {"message", v.message}});
  j["violations"] = violations;
  return j;
}

Json verify_to_json(const Net& net, const VerifyVerdict& verdict) {
  Json j;
  j["pass"] = verdict.pass;
  j["configurations"] = verdict.configurations;
  j["longest_internal_run"] = verdict.longest_internal_run;
  Json violations = Json::array();
  for (const auto& v : verdict.violations)
    violations.push_back({{"check", v.check}, {"message", v.message}, {"witness", places_json(net, v.witness)}});
  j["violations"] = violations;
  return j;
}

}  // namespace knowctl
