#include "tube/scenario_io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

namespace tube {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& msg) { raise(Errc::ParseError, msg); }

// Closed schema: every listed key must be present and no other key may appear.
void check_keys(const json& obj, const char* where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) bad(std::string(where) + " must be a JSON object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : keys)
      if (item.key() == k) { known = true; break; }
    if (!known) bad("unknown field \"" + item.key() + "\" in " + where);
  }
  for (const char* k : keys)
    if (!obj.contains(k)) bad("missing field \"" + std::string(k) + "\" in " + where);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) bad(where + " must be a number");
  return v.get<double>();
}

Vec2 point(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) bad(where + " must be a two-element array");
  return {number(v[0], where + "[0]"), number(v[1], where + "[1]")};
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }
  check_keys(j, "scenario", {"version", "tube", "agents", "params", "sim"});

  if (!j["version"].is_string() || j["version"].get<std::string>() != "tube-scenario-1")
    bad("version must be \"tube-scenario-1\"");

  const json& tube = j["tube"];
  if (!tube.is_array() || tube.size() < 2) bad("tube must list at least two bases");
  std::vector<QuadrangleChain::BaseSegment> bases;
  bases.reserve(tube.size());
  for (size_t q = 0; q < tube.size(); ++q) {
    const json& b = tube[q];
    std::string where = "tube[" + std::to_string(q) + "]";
    if (!b.is_array() || b.size() != 2) bad(where + " must be a [right, left] pair");
    bases.push_back({point(b[0], where + ".right"), point(b[1], where + ".left")});
  }

  ScenarioConfig cfg;
  cfg.chain = QuadrangleChain::build(bases);

  const json& agents = j["agents"];
  if (!agents.is_array()) bad("agents must be an array");
  for (size_t i = 0; i < agents.size(); ++i) {
    std::string where = "agents[" + std::to_string(i) + "]";
    check_keys(agents[i], where.c_str(), {"position", "v_max"});
    AgentState a;
    a.id = static_cast<int>(i);
    a.p = point(agents[i]["position"], where + ".position");
    a.v_max = number(agents[i]["v_max"], where + ".v_max");
    cfg.agents.push_back(a);
  }

  const json& p = j["params"];
  check_keys(p, "params",
             {"k1", "k2", "k3", "eps_m", "eps_s", "eps_t", "eps_0", "r_s", "r_a", "lambda0"});
  cfg.params.k1 = number(p["k1"], "params.k1");
  cfg.params.k2 = number(p["k2"], "params.k2");
  cfg.params.k3 = number(p["k3"], "params.k3");
  cfg.params.eps_m = number(p["eps_m"], "params.eps_m");
  cfg.params.eps_s = number(p["eps_s"], "params.eps_s");
  cfg.params.eps_t = number(p["eps_t"], "params.eps_t");
  cfg.params.eps_0 = number(p["eps_0"], "params.eps_0");
  cfg.params.r_s = number(p["r_s"], "params.r_s");
  cfg.params.r_a = number(p["r_a"], "params.r_a");
  cfg.params.lambda0 = number(p["lambda0"], "params.lambda0");

  const json& sim = j["sim"];
  check_keys(sim, "sim", {"dt", "t_end", "logic"});
  cfg.dt = number(sim["dt"], "sim.dt");
  cfg.t_end = number(sim["t_end"], "sim.t_end");
  if (!sim["logic"].is_string()) bad("sim.logic must be a string");
  cfg.logic = parse_logic(sim["logic"].get<std::string>());
  return cfg;
}

std::string serialize_scenario(const ScenarioConfig& cfg) {
  json j;
  j["version"] = "tube-scenario-1";
  json tube = json::array();
  for (int q = 0; q <= cfg.chain.count(); ++q) {
    const auto& b = cfg.chain.base(q);
    tube.push_back(json::array({json::array({b.right.x, b.right.y}),
                                json::array({b.left.x, b.left.y})}));
  }
  j["tube"] = std::move(tube);
  json agents = json::array();
  for (const AgentState& a : cfg.agents) {
    json e;
    e["position"] = json::array({a.p.x, a.p.y});
    e["v_max"] = a.v_max;
    agents.push_back(std::move(e));
  }
  j["agents"] = std::move(agents);
  json p;
  p["k1"] = cfg.params.k1;
  p["k2"] = cfg.params.k2;
  p["k3"] = cfg.params.k3;
  p["eps_m"] = cfg.params.eps_m;
  p["eps_s"] = cfg.params.eps_s;
  p["eps_t"] = cfg.params.eps_t;
  p["eps_0"] = cfg.params.eps_0;
  p["r_s"] = cfg.params.r_s;
  p["r_a"] = cfg.params.r_a;
  p["lambda0"] = cfg.params.lambda0;
  j["params"] = std::move(p);
  json sim;
  sim["dt"] = cfg.dt;
  sim["t_end"] = cfg.t_end;
  sim["logic"] = logic_name(cfg.logic);
  j["sim"] = std::move(sim);
  return j.dump(2) + "\n";
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::IoError, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

void save_scenario(const ScenarioConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(Errc::IoError, "cannot write " + path);
  out << serialize_scenario(cfg);
  if (!out.flush()) raise(Errc::IoError, "cannot write " + path);
}

}  // namespace tube
