#include <gtest/gtest.h>

#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "knowctl/error.hpp"
#include "knowctl/io.hpp"
#include "support.hpp"

using namespace knowctl;
using testing_support::fig;

namespace {

const char* kFig2 = R"({"places":["p1","p2","p3","p4","p5","p6"],
  "transitions":[{"name":"a","in":["p1"],"out":["p3"]},{"name":"b","in":["p2"],"out":["p4"]},
                 {"name":"c","in":["p3"],"out":["p5"]},{"name":"d","in":["p4"],"out":["p6"]}],
  "initial":["p1","p2"],"processes":{"pi_l":["a","c"],"pi_r":["b","d"]},
  "priorities":[["a","d"],["b","c"]]})";

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidArgument;
}

std::string patched(std::string text, const std::string& from, const std::string& to) {
  auto at = text.find(from);
  EXPECT_NE(at, std::string::npos) << from;
  return text.replace(at, from.size(), to);
}

ControllerArtifact controller_for(const Net& n, KappaFlavor flavor, bool ordered) {
  static std::vector<std::unique_ptr<SafeControl>> keep_safe;
  static std::vector<std::unique_ptr<Universe>> keep_universe;
  keep_safe.push_back(std::make_unique<SafeControl>(solve(n, compile_invariant(n))));
  keep_universe.push_back(std::make_unique<Universe>(Universe::over_good(n, *keep_safe.back())));
  KnowledgeEvaluator ev(*keep_universe.back(), *keep_safe.back(), keep_safe.back()->graph);
  SynthesisOptions o;
  o.supervisors = SupervisorMode::Single;
  o.flavor = flavor;
  if (ordered) o.order = OrderPairs{{0, 1}};
  return emit_controller(ev, o);
}

}  // namespace

TEST(Io, NetRoundTrip) {
  Net n = parse_net(kFig2);
  const Json j = net_to_json(n);
  Net again = parse_net(j.dump());
  EXPECT_EQ(net_to_json(again).dump(), j.dump());
  EXPECT_EQ(net_hash(n), net_hash(again));
  EXPECT_EQ(net_hash(n), net_hash(fig("fig2")));
  EXPECT_NE(net_hash(n), net_hash(fig("fig1")));
  EXPECT_EQ(net_hash(n).size(), 64U);
}

TEST(Io, FormattingDoesNotChangeHash) {
  Json j = Json::parse(kFig2);
  EXPECT_EQ(net_hash(parse_net(j.dump(2))), net_hash(parse_net(kFig2)));
}

TEST(Io, RoundTripWithOptionalSections) {
  const std::string text = R"({"places":["p","q"],
    "transitions":[{"name":"t","in":["p"],"out":["q"],"controllable":false},{"name":"u","in":["q"],"out":["p"]}],
    "initial":["p"],"processes":{"x":["t"],"y":["u"]},"priorities":[],
    "invariant":{"kind":"pairs","pairs":[{"when":"p","transition":"t"},{"marking":["q"],"transition":"*"}]},
    "supervisors":{"S":["x","y"]},"order":[["x","y"]]})";
  Net n = parse_net(text);
  EXPECT_FALSE(n.transition(0).controllable);
  ASSERT_EQ(n.supervisors().size(), 1U);
  EXPECT_EQ(n.order().size(), 1U);
  EXPECT_EQ(net_to_json(parse_net(net_to_json(n).dump())).dump(), net_to_json(n).dump());
}

TEST(Io, ControllerRoundTrip) {
  Net n = fig("fig2");
  for (auto flavor : {KappaFlavor::Simplified, KappaFlavor::Full})
    for (bool ordered : {false, true}) {
      auto art = controller_for(n, flavor, ordered);
      const Json j = controller_to_json(n, art);
      auto back = controller_from_json(n, Json::parse(j.dump()));
      EXPECT_EQ(controller_to_json(n, back).dump(), j.dump());
      EXPECT_EQ(back.net_hash, art.net_hash);
    }
}

TEST(Io, ControllerForAnotherNet) {
  Net n = fig("fig2");
  auto j = controller_to_json(n, controller_for(n, KappaFlavor::Simplified, false));
  j["net_hash"] = std::string(64, '0');
  EXPECT_EQ(kind_of([&] { (void)controller_from_json(n, j); }), ErrorKind::HashMismatch);
}

TEST(Io, MalformedNets) {
  const std::string base = kFig2;
  EXPECT_EQ(kind_of([&] { (void)parse_net("{"); }), ErrorKind::Syntax);
  EXPECT_EQ(kind_of([&] { (void)parse_net("[]"); }), ErrorKind::Syntax);
  EXPECT_EQ(kind_of([&] { (void)parse_net(patched(base, R"("initial")", R"("initials")")); }), ErrorKind::Syntax);
  EXPECT_EQ(kind_of([&] { (void)parse_net(patched(base, R"("in":["p1"])", R"("in":"p1")")); }), ErrorKind::Syntax);
  EXPECT_EQ(kind_of([&] { (void)parse_net(patched(base, R"("out":["p3"])", R"("out":["p9"])")); }),
            ErrorKind::UnknownPlace);
  EXPECT_EQ(kind_of([&] { (void)parse_net(patched(base, R"("name":"b")", R"("name":"a")")); }),
            ErrorKind::DuplicateName);
  EXPECT_EQ(kind_of([&] { (void)parse_net(patched(base, R"("pi_r":["b","d"])", R"("pi_r":["b"])")); }),
            ErrorKind::UncoveredTransition);
  EXPECT_EQ(kind_of([&] { (void)parse_net(patched(base, R"(["b","c"])", R"(["d","a"])")); }),
            ErrorKind::CyclicPriority);
  EXPECT_EQ(kind_of([&] { (void)parse_net(patched(base, R"("pi_l":["a","c"])", R"("pi_l":["a","c","zz"])")); }),
            ErrorKind::UnknownTransition);
  EXPECT_EQ(kind_of([&] {
              (void)parse_net(patched(base, R"("priorities")", R"("supervisors":{"S":["pi_l"],"T":["pi_l"]},"priorities")"));
            }),
            ErrorKind::OverlappingSupervisors);
  EXPECT_EQ(kind_of([&] {
              (void)parse_net(patched(base, R"("priorities")", R"("order":[["pi_l","pi_r"],["pi_r","pi_l"]],"priorities")"));
            }),
            ErrorKind::InvalidOrder);
  EXPECT_EQ(kind_of([&] {
              (void)parse_net(patched(base, R"("priorities")", R"J("invariant":{"kind":"state_predicate","expr":"good(a)"},"priorities")J"));
            }),
            ErrorKind::MalformedPredicate);
}

TEST(Io, SyntaxErrorsCarryLocation) {
  try {
    (void)parse_net("{\n  \"places\": [\"p\",\n}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  try {
    (void)parse_net(patched(kFig2, R"("in":["p1"])", R"("in":[1])"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("transitions"), std::string::npos) << e.what();
  }
}

TEST(Io, MissingFile) {
  EXPECT_EQ(kind_of([] { (void)load_net("/nonexistent/net.json"); }), ErrorKind::Io);
}

// Random byte edits of a valid net either parse or fail with a library error.
TEST(Io, MutatedInputsNeverCrash) {
  const std::string base = kFig2;
  std::mt19937_64 rng(7);
  const std::string alphabet = "{}[]\",:ab1p_ \n";
  std::size_t parsed = 0, rejected = 0;
  for (int i = 0; i < 2000; ++i) {
    std::string text = base;
    const int edits = 1 + static_cast<int>(rng() % 3);
    for (int k = 0; k < edits; ++k) {
      const std::size_t at = rng() % text.size();
      switch (rng() % 3) {
        case 0: text.erase(at, 1); break;
        case 1: text.insert(at, 1, alphabet[rng() % alphabet.size()]); break;
        default: text[at] = alphabet[rng() % alphabet.size()]; break;
      }
    }
    try {
      Net n = parse_net(text);
      (void)net_hash(n);
      ++parsed;
    } catch (const Error&) {
      ++rejected;
    }
  }
  EXPECT_EQ(parsed + rejected, 2000U);
  EXPECT_GT(rejected, 0U);
}

TEST(Io, MalformedControllers) {
  Net n = fig("fig2");
  const Json good = controller_to_json(n, controller_for(n, KappaFlavor::Simplified, false));
  for (const char* key : {"local_tables", "supervisors", "net_hash"}) {
    Json j = good;
    j.erase(key);
    EXPECT_EQ(kind_of([&] { (void)controller_from_json(n, j); }), ErrorKind::Syntax) << key;
  }
  Json extra = good;
  extra["surprise"] = 1;
  EXPECT_EQ(kind_of([&] { (void)controller_from_json(n, extra); }), ErrorKind::Syntax);
}

TEST(Io, SolveJsonShape) {
  Net n = fig("fig2");
  auto j = solve_to_json(n, solve(n, compile_invariant(n)));
  EXPECT_TRUE(j["winnable"].get<bool>());
  EXPECT_EQ(j["good"].size(), 8U);
  EXPECT_EQ(j["safe"].size(), 8U);
  EXPECT_EQ(j["safe"][0].dump(), R"([["p1","p2"],"a"])");
}
