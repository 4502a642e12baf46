#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "coframe/gauge.hpp"

namespace coframe {

// Machine-readable registry of every solution family, with parameters,
// boundary conditions and the equation each must satisfy.

enum class Equation { Holomorphic, HYM, DHYM, Spin7, DSpin7, HyperHolo };

struct EquationId {
  Equation kind;
  int index;  // which om_i / Phi_i (1..3); 0 selects Phi_BS
};

std::string equation_name(const EquationId& id);

struct ClosedPayload {
  std::map<std::string, ExprPtr> coeffs;  // label -> closed expression
};

struct ImplicitPayload {
  std::string unknown;            // formal symbol solved per radius
  std::vector<ExprPtr> poly;      // c0..cd in the unknown, Exprs in r/params
  std::map<std::string, ExprPtr> coeffs;  // ansatz carrying the formal symbol
  ExprPtr boundary_value;         // expected limit at r0; null = no filter
};

struct OdePayload {
  std::map<std::string, ExprPtr> coeffs;  // ansatz carrying formal p
  ExprPtr num, den;                       // p' = num/den, Exprs in (r, p)
  ExprPtr residual;                       // den p' - num, Exprs in (r, p, p')
};

struct SolutionFamily {
  std::string id;
  std::string geometry_id;  // "eh" | "flag" | "calabi" | "bs"
  bool cone = false;        // geometry c pinned to 0
  EquationId equation;
  std::variant<ClosedPayload, ImplicitPayload, OdePayload> payload;
  std::vector<std::string> params;  // free parameter names
  ParamEnv defaults;
  std::string note;
};

const std::vector<SolutionFamily>& registry();
std::vector<std::string> list_families();

struct Instantiated {
  const SolutionFamily* family;
  GeometryPtr geom;
  ParamEnv env;  // geometry c + defaults + user overrides; phase resolved
  ConnectionAnsatz ansatz;  // formal coefficients for Implicit/Ode payloads
};

// Binds user parameters over the family defaults, resolves phase and sign
// selections, and builds the geometry and the connection ansatz.
Instantiated instantiate(const std::string& id, const ParamEnv& user);

// Phase angle of the flag-manifold connection (a1, a3): the arctan-sum
// representative, reduced mod 2pi into (-pi, pi].
double phase_of_flag(long long a1, long long a3);
// Rational tan(theta) = num/den from the closed formula. Returns false on
// the pole set (den = 0).
bool flag_phase_tan(long long a1, long long a3, long long* num,
                    long long* den);

}  // namespace coframe
