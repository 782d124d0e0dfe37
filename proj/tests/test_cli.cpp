#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Output {
  int code;
  std::string out;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("knowctl-cli-" + std::to_string(::getpid()) + "-" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Output run(const std::string& args) const {
    const fs::path out = dir_ / "out.txt";
    const std::string cmd = std::string("'") + KNOWCTL_BIN + "' " + args + " > '" + out.string() + "' 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(out);
    std::ostringstream s;
    s << in.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, s.str()};
  }
  std::string net(const std::string& name) const { return std::string(KNOWCTL_NETS_DIR) + "/" + name + ".json"; }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, AnalyzeJson) {
  auto r = run("analyze " + net("fig1") + " --json");
  ASSERT_EQ(r.code, 0) << r.out;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["reachable"].get<int>(), 8);
  EXPECT_EQ(j["executions"].size(), 2U);
}

TEST_F(Cli, KnowExitStatusIsTheAnswer) {
  EXPECT_EQ(run("know " + net("fig2") + " --at p1,p2 --formula 'Ks[pi_l,pi_r] (good(a) | good(b))'").code, 0);
  EXPECT_EQ(run("know " + net("fig2") + " --at p1,p2 --formula 'Kw[pi_l] good(a)'").code, 1);
  EXPECT_EQ(run("know " + net("fig2") + " --at p1,p2 --formula 'Kw[pi_l] good(a)' --low-memory").code, 1);
}

TEST_F(Cli, SynthesizeSimulateVerify) {
  const std::string ctl = path("ctl.json");
  ASSERT_EQ(run("synthesize " + net("fig2") + " --supervisors single -o " + ctl).code, 0);
  auto sim = run("simulate " + net("fig2") + " " + ctl + " --seed 3 --trace " + path("t.jsonl") + " --json");
  ASSERT_EQ(sim.code, 0) << sim.out;
  EXPECT_TRUE(nlohmann::json::parse(sim.out)["pass"].get<bool>()) << sim.out;
  std::ifstream trace(path("t.jsonl"));
  std::string line;
  std::size_t lines = 0;
  while (std::getline(trace, line)) {
    auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j["idx"].get<std::size_t>(), lines);
    ++lines;
  }
  EXPECT_GT(lines, 4U);
  auto v = run("verify " + net("fig2") + " " + ctl + " --json");
  EXPECT_EQ(v.code, 0) << v.out;
  EXPECT_TRUE(nlohmann::json::parse(v.out)["pass"].get<bool>());
}

TEST_F(Cli, ScriptedScheduler) {
  const std::string ctl = path("ctl.json");
  ASSERT_EQ(run("synthesize " + net("fig1") + " -o " + ctl).code, 0);
  write("s.txt", "fire b\nhang pi_l\nfire d\nfire a\n");
  auto r = run("simulate " + net("fig1") + " " + ctl + " --scheduler script:" + path("s.txt"));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("view-changed"), std::string::npos) << r.out;
  write("bad.txt", "fire c\n");
  EXPECT_EQ(run("simulate " + net("fig1") + " " + ctl + " --scheduler script:" + path("bad.txt")).code, 9);
}

TEST_F(Cli, ErrorExitCodes) {
  EXPECT_EQ(run("analyze /nonexistent.json").code, 3);
  write("broken.json", "{\"places\": [");
  auto r = run("analyze " + path("broken.json"));
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.out.find("error [Syntax]"), std::string::npos) << r.out;
  EXPECT_EQ(run("know " + net("fig2") + " --at p1,p2 --formula 'good(zz)'").code, 5);
  EXPECT_EQ(run("know " + net("fig2") + " --at p3,p4 --formula 'p3'").code, 7);
  EXPECT_EQ(run("synthesize " + net("fig2") + " --supervisors from-file -o " + path("c.json")).code, 8);
  EXPECT_EQ(run("synthesize " + net("fig2") + " --order 'pi_l>pi_l' --supervisors single -o " + path("c.json")).code, 5);
  ASSERT_EQ(run("synthesize " + net("fig1") + " -o " + path("c1.json")).code, 0);
  EXPECT_EQ(run("verify " + net("fig2") + " " + path("c1.json")).code, 9);
  EXPECT_EQ(run("analyze").code, 2);
  EXPECT_EQ(run("analyze " + net("fig2") + " --bound 0").code, 2);
}

TEST_F(Cli, StateCapFromEnvironment) {
  const std::string cmd = "KNOWCTL_STATE_CAP=3 '" + std::string(KNOWCTL_BIN) + "' solve " + net("fig2") + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  EXPECT_EQ(WEXITSTATUS(status), 6);
}
