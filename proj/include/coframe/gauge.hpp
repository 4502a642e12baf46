#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "coframe/algebra.hpp"
#include "coframe/geometry.hpp"

namespace coframe {

// Invariant abelian connection ansatz: a coefficient expression per permitted
// coframe label (th1..th4 on T*CP^2 and the spinor bundle, eta1..eta3 on
// Eguchi-Hanson, th1/th3 on the flag). Closed families use concrete
// expressions, reduction mode uses formal symbols; both evaluate through the
// same env mechanism.
struct ConnectionAnsatz {
  GeometryPtr geom;
  std::map<std::string, ExprPtr> coeffs;
};

ConnectionAnsatz make_ansatz(GeometryPtr g,
                             std::map<std::string, ExprPtr> coeffs);

// F = dA for the abelian ansatz.
Form curvature(const ConnectionAnsatz& a);

// A residual form together with the constituent terms whose sup-norm sets the
// relative scale (coefficients grow like r^8; absolute tolerances would be
// meaningless).
struct Residual {
  Form form;
  std::vector<Form> scale_terms;
};

double relative_residual(const Residual& res, double r, const ParamEnv& env);
double max_relative_residual(const Residual& res, std::span<const double> grid,
                             const ParamEnv& env);

// Holomorphicity with respect to J_i: the real and imaginary parts of
// F ^ (om_j + i om_k)^m with m = complex_dim/2 (a 4-form condition on
// Eguchi-Hanson, 6-form on T*CP^2).
std::pair<Residual, Residual> residual_holomorphic(const ConnectionAnsatz& a,
                                                   int i);

// cos(theta) Im((om + iF)^n) - sin(theta) Re((om + iF)^n).
Residual residual_dhym(const ConnectionAnsatz& a, int i, const ExprPtr& sin_t,
                       const ExprPtr& cos_t);

// F ^ om_i^(n-1) - lambda om_i^n.
Residual residual_hym(const ConnectionAnsatz& a, int i, const ExprPtr& lambda);

// (F + *(F ^ Phi))/4.
Residual residual_spin7(const ConnectionAnsatz& a, const Form& Phi);

// The two deformed equations: per-sample norms of the Lambda^4_7 projection
// of F ^ F (relative to |F ^ F|), and the 2-form pi27(F - (1/6) * F^3).
struct DSpin7Report {
  std::vector<double> pi47_relative;
  Residual eq2;
};

DSpin7Report residual_dspin7(const ConnectionAnsatz& a, const Form& Phi,
                             std::span<const double> grid,
                             const ParamEnv& env);

// The symbolic ingredients of the deformed equations, for callers that bind
// formal symbols per sample: F ^ F for the Lambda^4_7 projection and the
// pi27 residual of equation (II).
struct DSpin7Parts {
  Form ff;
  Residual eq2;
};

DSpin7Parts dspin7_parts(const ConnectionAnsatz& a, const Form& Phi);

// Relative Lambda^4_7 projection norm of a 4-form at one radius.
double pi47_relative(const Lambda47& l47, const Form& ff, const Geometry& g,
                     double r, const ParamEnv& env);

// The scalar *F^4 (ratio of the top-form coefficient of F^4 to the volume
// coefficient).
ExprPtr f4_over_vol(const ConnectionAnsatz& a);

}  // namespace coframe
