#pragma once
// Typed error hierarchy. Every library failure throws tube::Error with a code
// so callers (CLI, tests) can branch without parsing message strings.

#include <stdexcept>
#include <string>

namespace tube {

enum class Errc {
  NonParallelBases,
  DegenerateTube,
  DegenerateLegAngle,
  OutOfSlab,
  OutsideTube,
  InvalidIndex,
  InvalidChain,
  DomainViolation,
  LogDomain,
  ConstraintUnsatisfiable,
  SafetyBreach,
  TubeBreach,
  WrongLogic,
  NonFinite,
  ParseError,
  InvalidScenario,
  IoError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc c, const std::string& msg) { throw Error(c, msg); }

}  // namespace tube
