#pragma once

#include <stdexcept>
#include <string>

namespace coframe {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct UnboundName : Error {
  explicit UnboundName(const std::string& name)
      : Error("unbound name: " + name), name(name) {}
  std::string name;
};

struct DomainError : Error {
  explicit DomainError(const std::string& msg) : Error("domain error: " + msg) {}
};

struct CoframeMismatch : Error {
  CoframeMismatch() : Error("forms live over different coframes") {}
};

struct MetricUndefined : Error {
  explicit MetricUndefined(const std::string& label)
      : Error("metric undefined on label: " + label) {}
};

struct MissingTriple : Error {
  explicit MissingTriple(const std::string& id)
      : Error("geometry has no hyperKahler triple: " + id) {}
};

struct MissingKahler : Error {
  explicit MissingKahler(const std::string& id)
      : Error("geometry has no distinguished Kahler form: " + id) {}
};

struct NotSpin7 : Error {
  explicit NotSpin7(const std::string& msg) : Error("not a Spin(7) form: " + msg) {}
};

struct UnknownFamily : Error {
  explicit UnknownFamily(const std::string& id) : Error("unknown family: " + id) {}
};

struct BadParams : Error {
  explicit BadParams(const std::string& msg) : Error("bad parameters: " + msg) {}
};

struct BranchAmbiguity : Error {
  explicit BranchAmbiguity(const std::string& msg)
      : Error("branch continuation ambiguous: " + msg) {}
};

struct StepFailure : Error {
  explicit StepFailure(const std::string& msg) : Error("ODE step failure: " + msg) {}
};

struct DenominatorVanished : Error {
  DenominatorVanished(double r, double p)
      : Error("ODE denominator vanished at r=" + std::to_string(r)),
        last_r(r),
        last_p(p) {}
  double last_r, last_p;
};

struct DegenerateAllZero : Error {
  DegenerateAllZero() : Error("polynomial has all zero coefficients") {}
};

struct SingularCoefficient : Error {
  explicit SingularCoefficient(const std::string& msg)
      : Error("singular series coefficient: " + msg) {}
};

}  // namespace coframe
