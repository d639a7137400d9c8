#pragma once

#include <string>

#include "tube/simulator.hpp"

namespace tube {

// Scenario files are strict JSON: every field listed below is required, any
// other field is rejected, so a round trip through parse + serialize is
// field-identical.  Lengths are meters, times seconds, speeds meters/second.
//
//   {
//     "version": "tube-scenario-1",
//     "tube":    [[[xr,yr],[xl,yl]], ...]      ordered bases, right then left
//     "agents":  [{"position":[x,y],"v_max":v}, ...]   ids are file order
//     "params":  {"k1","k2","k3","eps_m","eps_s","eps_t","eps_0",
//                 "r_s","r_a","lambda0"}
//     "sim":     {"dt","t_end","logic"}
//   }
//
// ScenarioConfig::seed is runtime-only state and never serialized.

// Raises ParseError on malformed JSON, wrong version, unknown or missing
// fields, or ill-typed values; chain construction errors propagate as-is.
ScenarioConfig parse_scenario(const std::string& text);

// Canonical text form; parse_scenario(serialize_scenario(cfg)) reproduces
// every field bit-exactly.
std::string serialize_scenario(const ScenarioConfig& cfg);

// File wrappers; raise IoError when the file cannot be read or written.
ScenarioConfig load_scenario(const std::string& path);
void save_scenario(const ScenarioConfig& cfg, const std::string& path);

}  // namespace tube
