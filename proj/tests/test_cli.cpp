#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "tube/scenario_io.hpp"

namespace fs = std::filesystem;
using namespace tube;

namespace {

const std::string kBin = TUBESIM_BIN;
const std::string kScenarios = SCENARIO_DIR;

fs::path fresh_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("tubesim_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

// Runs the tool with stdout+stderr captured; returns the exit code.
int run_tool(const std::string& args, const fs::path& log) {
  std::string cmd = kBin + " " + args + " >" + log.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
  REQUIRE(out.good());
}

bool has(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

// Minimal corridor scenario with adjustable pieces, for invalid variants.
std::string corridor_json(const std::string& agents, double half_width, double r_s,
                          double lambda0) {
  std::ostringstream s;
  s << "{\"version\":\"tube-scenario-1\",\"tube\":[[[0,-" << half_width << "],[0," << half_width
    << "]],[[8,-" << half_width << "],[8," << half_width << "]]],\"agents\":[" << agents
    << "],\"params\":{\"k1\":1,\"k2\":1,\"k3\":1,\"eps_m\":1e-6,\"eps_s\":1e-6,\"eps_t\":1e-6,"
       "\"eps_0\":0.03,\"r_s\":"
    << r_s << ",\"r_a\":" << r_s + 0.5 << ",\"lambda0\":" << lambda0
    << "},\"sim\":{\"dt\":0.001,\"t_end\":2.0,\"logic\":\"modified\"}}";
  return s.str();
}

}  // namespace

TEST_CASE("simulate writes the full trace directory and a faithful scenario copy") {
  fs::path dir = fresh_dir("simulate");
  fs::path log = dir / "log.txt";
  int rc = run_tool("simulate --scenario " + kScenarios + "/trapezoid5.json --out " +
                        (dir / "out").string() + " --snapshot-times 0,2.5",
                    log);
  CHECK(rc == 0);
  CHECK(has(slurp(log), "outcome: all_arrived"));

  for (const char* f : {"trajectory.csv", "metrics.csv", "summary.json", "scenario.json",
                        "snapshot_0.000.svg", "snapshot_2.500.svg"})
    CHECK(fs::exists(dir / "out" / f));

  std::string traj = slurp(dir / "out" / "trajectory.csv");
  CHECK(has(traj, "t,id,x,y,vx,vy,arrived"));
  CHECK(has(traj, "0.000000,0,0.800000000,0.800000000,"));
  std::string summary = slurp(dir / "out" / "summary.json");
  CHECK(has(summary, "\"outcome\": \"all_arrived\""));
  CHECK(has(summary, "\"violations\": []"));

  ScenarioConfig original = load_scenario(kScenarios + "/trapezoid5.json");
  ScenarioConfig copy = load_scenario((dir / "out" / "scenario.json").string());
  CHECK(serialize_scenario(original) == serialize_scenario(copy));
  REQUIRE(copy.agents.size() == original.agents.size());
  for (size_t i = 0; i < copy.agents.size(); ++i) {
    CHECK(copy.agents[i].p.x == original.agents[i].p.x);
    CHECK(copy.agents[i].p.y == original.agents[i].p.y);
    CHECK(copy.agents[i].v_max == original.agents[i].v_max);
  }
  CHECK(copy.params.r_s == original.params.r_s);
  CHECK(copy.dt == original.dt);
  CHECK(copy.logic == original.logic);
}

TEST_CASE("scenario round-trip through parse and serialize is field-identical") {
  for (const char* name : {"chain20", "quad4", "trapezoid5", "deadlock_elbow"}) {
    ScenarioConfig a = load_scenario(kScenarios + "/" + std::string(name) + ".json");
    std::string text = serialize_scenario(a);
    ScenarioConfig b = parse_scenario(text);
    CHECK(serialize_scenario(b) == text);
    REQUIRE(b.chain.count() == a.chain.count());
    for (int q = 0; q <= a.chain.count(); ++q) {
      CHECK(b.chain.base(q).right.x == a.chain.base(q).right.x);
      CHECK(b.chain.base(q).left.y == a.chain.base(q).left.y);
    }
  }
}

TEST_CASE("timeout is an outcome, not an error") {
  fs::path dir = fresh_dir("timeout");
  fs::path log = dir / "log.txt";
  int rc = run_tool("simulate --scenario " + kScenarios + "/deadlock_elbow.json --out " +
                        (dir / "out").string(),
                    log);
  CHECK(rc == 0);
  CHECK(has(slurp(log), "outcome: timeout"));
  std::string summary = slurp(dir / "out" / "summary.json");
  CHECK(has(summary, "\"outcome\": \"timeout\""));
  CHECK(has(summary, "null"));  // nobody arrived
}

TEST_CASE("trace files are byte-identical across runs and thread counts") {
  fs::path dir = fresh_dir("determinism");
  fs::path log = dir / "log.txt";
  CHECK(run_tool("simulate --scenario " + kScenarios + "/trapezoid5.json --out " +
                     (dir / "a").string() + " --threads 1",
                 log) == 0);
  CHECK(run_tool("simulate --scenario " + kScenarios + "/trapezoid5.json --out " +
                     (dir / "b").string() + " --threads 3",
                 log) == 0);
  CHECK(slurp(dir / "a" / "trajectory.csv") == slurp(dir / "b" / "trajectory.csv"));
  CHECK(slurp(dir / "a" / "metrics.csv") == slurp(dir / "b" / "metrics.csv"));
  CHECK(slurp(dir / "a" / "scenario.json") == slurp(dir / "b" / "scenario.json"));
}

TEST_CASE("plot renders deterministic images from a trace directory") {
  fs::path dir = fresh_dir("plot");
  fs::path log = dir / "log.txt";
  REQUIRE(run_tool("simulate --scenario " + kScenarios + "/deadlock_elbow.json --out " +
                       (dir / "run").string(),
                   log) == 0);
  CHECK(run_tool("plot --trace-dir " + (dir / "run").string() + " --out " + (dir / "p1").string(),
                 log) == 0);
  CHECK(run_tool("plot --trace-dir " + (dir / "run").string() + " --out " + (dir / "p2").string(),
                 log) == 0);
  std::string svg = slurp(dir / "p1" / "metrics.svg");
  CHECK(has(svg, "<svg"));
  CHECK(has(svg, "2 r_s = 0.600"));
  CHECK(has(svg, "r_s = 0.300"));
  CHECK(svg == slurp(dir / "p2" / "metrics.svg"));
  CHECK(slurp(dir / "p1" / "trajectory.svg") == slurp(dir / "p2" / "trajectory.svg"));

  SUBCASE("missing trace directory") {
    CHECK(run_tool("plot --trace-dir " + (dir / "nowhere").string() + " --out " +
                       (dir / "p3").string(),
                   log) == 2);
  }
  SUBCASE("empty trace") {
    fs::path empty = dir / "empty";
    fs::create_directories(empty);
    spit(empty / "trajectory.csv", "t,id,x,y,vx,vy,arrived\n");
    spit(empty / "metrics.csv", "t,min_pair_dist,min_boundary_dist\n");
    CHECK(run_tool("plot --trace-dir " + empty.string() + " --out " + (dir / "p4").string(),
                   log) == 2);
    CHECK(has(slurp(log), "empty trace"));
  }
}

TEST_CASE("parse failures exit with code 2") {
  fs::path dir = fresh_dir("parse");
  fs::path log = dir / "log.txt";
  fs::path out = dir / "out";
  const std::string agents =
      "{\"position\":[1.0,0.5],\"v_max\":1},{\"position\":[2.0,-0.5],\"v_max\":1}";

  SUBCASE("missing file") {
    CHECK(run_tool("simulate --scenario " + (dir / "nope.json").string() + " --out " +
                       out.string(),
                   log) == 2);
    CHECK(has(slurp(log), "cannot read"));
  }
  SUBCASE("malformed JSON") {
    spit(dir / "bad.json", "{not json");
    CHECK(run_tool("simulate --scenario " + (dir / "bad.json").string() + " --out " + out.string(),
                   log) == 2);
    CHECK(has(slurp(log), "invalid JSON"));
  }
  SUBCASE("wrong version") {
    std::string text = corridor_json(agents, 1.4, 0.3, 3.0);
    text.replace(text.find("tube-scenario-1"), 15, "tube-scenario-9");
    spit(dir / "ver.json", text);
    CHECK(run_tool("simulate --scenario " + (dir / "ver.json").string() + " --out " + out.string(),
                   log) == 2);
    CHECK(has(slurp(log), "version"));
  }
  SUBCASE("unknown field is rejected, including a sim seed") {
    std::string text = corridor_json(agents, 1.4, 0.3, 3.0);
    text.replace(text.find("\"dt\""), 4, "\"seed\":7,\"dt\"");
    spit(dir / "seed.json", text);
    CHECK(run_tool("simulate --scenario " + (dir / "seed.json").string() + " --out " +
                       out.string(),
                   log) == 2);
    CHECK(has(slurp(log), "unknown field \"seed\" in sim"));
  }
  SUBCASE("bad logic override") {
    CHECK(run_tool("simulate --scenario " + kScenarios + "/trapezoid5.json --out " +
                       out.string() + " --logic-override warp",
                   log) == 2);
    CHECK(has(slurp(log), "unknown logic"));
  }
}

TEST_CASE("validation failures exit with code 3 and list every clause") {
  fs::path dir = fresh_dir("validation");
  fs::path log = dir / "log.txt";
  fs::path out = dir / "out";

  SUBCASE("initial overlap") {
    spit(dir / "overlap.json",
         corridor_json("{\"position\":[1.0,0.2],\"v_max\":1},{\"position\":[1.0,-0.2],"
                       "\"v_max\":1}",
                       1.4, 0.3, 3.0));
    CHECK(run_tool("simulate --scenario " + (dir / "overlap.json").string() + " --out " +
                       out.string(),
                   log) == 3);
    CHECK(has(slurp(log), "initial overlap: agents 0 and 1"));
  }
  SUBCASE("corridor too narrow for one agent") {
    spit(dir / "narrow.json",
         corridor_json("{\"position\":[1.0,0.0],\"v_max\":1}", 0.28, 0.3, 3.0));
    CHECK(run_tool("simulate --scenario " + (dir / "narrow.json").string() + " --out " +
                       out.string(),
                   log) == 3);
    CHECK(has(slurp(log), "wide enough for at least one agent to pass"));
  }
  SUBCASE("lambda0 below the extension minimum") {
    spit(dir / "lam.json",
         corridor_json("{\"position\":[1.0,0.0],\"v_max\":1}", 1.4, 0.3, 0.5));
    CHECK(run_tool("simulate --scenario " + (dir / "lam.json").string() + " --out " + out.string(),
                   log) == 3);
    CHECK(has(slurp(log), "lambda0 must be at least 1"));
  }
  SUBCASE("check validates before running oracles") {
    spit(dir / "overlap2.json",
         corridor_json("{\"position\":[1.0,0.2],\"v_max\":1},{\"position\":[1.0,-0.2],"
                       "\"v_max\":1}",
                       1.4, 0.3, 3.0));
    CHECK(run_tool("check --scenario " + (dir / "overlap2.json").string(), log) == 3);
    CHECK(has(slurp(log), "scenario invalid"));
  }
}

TEST_CASE("a runtime safety stop exits with code 4 naming step and agent") {
  fs::path dir = fresh_dir("safety");
  fs::path log = dir / "log.txt";
  // A coarse override makes Euler steps overshoot the barriers.
  int rc = run_tool("simulate --scenario " + kScenarios + "/trapezoid5.json --out " +
                        (dir / "out").string() + " --dt-override 0.7 --logic-override modified",
                    log);
  CHECK(rc == 4);
  std::string text = slurp(log);
  CHECK(has(text, "safety stop:"));
  CHECK(has(text, "step "));
  CHECK(has(text, "agent "));

  SUBCASE("the gradient-flow energy sampler reports its step too") {
    int rc2 = run_tool("simulate --scenario " + kScenarios + "/trapezoid5.json --out " +
                           (dir / "out2").string() + " --dt-override 0.7",
                       log);
    CHECK(rc2 == 4);
    CHECK(has(slurp(log), "step "));
  }
}

TEST_CASE("check passes every bundled scenario and prints one report per oracle") {
  fs::path dir = fresh_dir("check");
  fs::path log = dir / "log.txt";
  int rc = run_tool("check --scenario " + kScenarios + "/deadlock_elbow.json", log);
  CHECK(rc == 0);
  std::string text = slurp(log);
  CHECK(has(text, "validation: PASS"));
  CHECK(has(text, "wall-safety (quadrangle 1)"));
  CHECK(has(text, "wall-safety (quadrangle 2)"));
  CHECK(has(text, "direction-constraints (quadrangle 2)"));
  CHECK(has(text, "pair-barrier-gradient"));
  CHECK(has(text, "panel-gradient"));
  CHECK(has(text, "wall-barrier-derivative"));
  CHECK(has(text, "keeping-gradient"));
  CHECK(has(text, "goal-term-quadrature"));
  CHECK(has(text, "all oracles: PASS"));
  CHECK(!has(text, "FAIL"));
}
